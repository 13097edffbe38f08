// SPDX-License-Identifier: Apache-2.0

//! Rooted-tree XOR cipher for one zone.
//!
//! A block is cut into `m` equal fragments by position. Every non-root node
//! stores its fragment XOR its parent's fragment; the root stores the XOR of
//! all non-root codewords and its own fragment. Each codeword is complemented
//! when the node's flip bit is set, and peer `i` holds the codeword of node
//! `assignment[i]`.
//!
//! # Key layout
//!
//! [`CipherKey::to_bytes`] writes, for a zone of `m` nodes (`m <= 255`):
//!
//! | field       | bytes          | content                                      |
//! |-------------|----------------|----------------------------------------------|
//! | prufer      | `max(m-2, 0)`  | Prüfer sequence of the unrooted tree          |
//! | root        | 1              | root node index                               |
//! | flips       | `ceil(m / 8)`  | flip of node `i` at bit `i % 8` of byte `i / 8`, padding zero |
//! | assignment  | `m`            | node index held by peer `0..m`                |

use std::collections::{BTreeSet, VecDeque};

use num_bigint::BigUint;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest zone size the key encoding supports.
pub const MAX_ZONE_SIZE: usize = 255;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CipherError {
    #[error("zone size must be in 1..={MAX_ZONE_SIZE}, got {0}")]
    BadZoneSize(usize),
    #[error("block of {len} bytes cannot be split into {m} equal fragments")]
    UnevenBlock { len: usize, m: usize },
    #[error("expected {expected} fragments, got {got}")]
    FragmentCount { expected: usize, got: usize },
    #[error("fragments have unequal lengths")]
    UnequalFragments,
    #[error("invalid tree: {0}")]
    InvalidTree(&'static str),
    #[error("assignment is not a permutation of 0..{0}")]
    NotPermutation(usize),
    #[error("flip vector has {got} bits, expected {expected}")]
    FlipLength { expected: usize, got: usize },
    #[error("malformed key encoding: {0}")]
    Decode(&'static str),
}

/// A rooted labeled tree on nodes `0..m`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RootedTree {
    parent: Vec<Option<usize>>,
    root: usize,
    children: Vec<Vec<usize>>,
    order: Vec<usize>,
}

impl RootedTree {
    /// Builds a tree from parent pointers; exactly one entry must be `None`.
    pub fn from_parents(parent: Vec<Option<usize>>) -> Result<Self, CipherError> {
        let m = parent.len();
        if m == 0 {
            return Err(CipherError::InvalidTree("empty"));
        }
        let mut roots = parent.iter().enumerate().filter(|(_, p)| p.is_none());
        let root = match (roots.next(), roots.next()) {
            (Some((r, _)), None) => r,
            _ => return Err(CipherError::InvalidTree("need exactly one root")),
        };
        let mut children = vec![Vec::new(); m];
        for (i, p) in parent.iter().enumerate() {
            if let Some(p) = *p {
                if p >= m || p == i {
                    return Err(CipherError::InvalidTree("bad parent index"));
                }
                children[p].push(i);
            }
        }
        let mut order = Vec::with_capacity(m);
        let mut queue = VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            queue.extend(children[v].iter().copied());
        }
        if order.len() != m {
            return Err(CipherError::InvalidTree("not all nodes reach the root"));
        }
        Ok(Self {
            parent,
            root,
            children,
            order,
        })
    }

    /// Decodes a Prüfer sequence (length `m - 2`, or empty for `m <= 2`)
    /// and orients the tree away from `root`.
    pub fn from_prufer(prufer: &[usize], m: usize, root: usize) -> Result<Self, CipherError> {
        if m == 0 || root >= m {
            return Err(CipherError::InvalidTree("root out of range"));
        }
        if prufer.len() != m.saturating_sub(2) || prufer.iter().any(|&v| v >= m) {
            return Err(CipherError::InvalidTree("bad Prüfer sequence"));
        }
        let mut adj = vec![Vec::new(); m];
        if m >= 2 {
            let mut degree = vec![1usize; m];
            for &v in prufer {
                degree[v] += 1;
            }
            for &v in prufer {
                let leaf = (0..m).find(|&u| degree[u] == 1).expect("a leaf exists");
                adj[leaf].push(v);
                adj[v].push(leaf);
                degree[leaf] -= 1;
                degree[v] -= 1;
            }
            let mut last = (0..m).filter(|&u| degree[u] == 1);
            let (a, b) = (last.next().unwrap(), last.next().unwrap());
            adj[a].push(b);
            adj[b].push(a);
        }
        let mut parent = vec![None; m];
        let mut seen = vec![false; m];
        seen[root] = true;
        let mut queue = VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            for &u in &adj[v] {
                if !seen[u] {
                    seen[u] = true;
                    parent[u] = Some(v);
                    queue.push_back(u);
                }
            }
        }
        Self::from_parents(parent)
    }

    /// Prüfer sequence of the underlying unrooted tree.
    pub fn prufer(&self) -> Vec<usize> {
        let m = self.len();
        if m <= 2 {
            return Vec::new();
        }
        let mut adj: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); m];
        for (i, p) in self.parent.iter().enumerate() {
            if let Some(p) = *p {
                adj[i].insert(p);
                adj[p].insert(i);
            }
        }
        let mut seq = Vec::with_capacity(m - 2);
        for _ in 0..m - 2 {
            let leaf = (0..m).find(|&u| adj[u].len() == 1).unwrap();
            let v = *adj[leaf].iter().next().unwrap();
            seq.push(v);
            adj[v].remove(&leaf);
            adj[leaf].clear();
        }
        seq
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn parent(&self, node: usize) -> Option<usize> {
        self.parent[node]
    }

    pub fn parents(&self) -> &[Option<usize>] {
        &self.parent
    }

    pub fn children(&self, node: usize) -> &[usize] {
        &self.children[node]
    }

    /// Nodes in breadth-first order from the root.
    pub fn topological_order(&self) -> &[usize] {
        &self.order
    }

    pub fn is_leaf(&self, node: usize) -> bool {
        self.children[node].is_empty()
    }

    /// `node` together with all of its descendants.
    pub fn subtree(&self, node: usize) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        let mut stack = vec![node];
        while let Some(v) = stack.pop() {
            out.insert(v);
            stack.extend(self.children[v].iter().copied());
        }
        out
    }
}

/// Zone key: tree, per-node flip bits and the peer-to-node assignment.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CipherKey {
    tree: RootedTree,
    flips: Vec<bool>,
    assignment: Vec<usize>,
    holder: Vec<usize>,
}

impl CipherKey {
    pub fn new(
        tree: RootedTree,
        flips: Vec<bool>,
        assignment: Vec<usize>,
    ) -> Result<Self, CipherError> {
        let m = tree.len();
        if m > MAX_ZONE_SIZE {
            return Err(CipherError::BadZoneSize(m));
        }
        if flips.len() != m {
            return Err(CipherError::FlipLength {
                expected: m,
                got: flips.len(),
            });
        }
        if assignment.len() != m {
            return Err(CipherError::NotPermutation(m));
        }
        let mut holder = vec![usize::MAX; m];
        for (peer, &node) in assignment.iter().enumerate() {
            if node >= m || holder[node] != usize::MAX {
                return Err(CipherError::NotPermutation(m));
            }
            holder[node] = peer;
        }
        Ok(Self {
            tree,
            flips,
            assignment,
            holder,
        })
    }

    /// Uniform key: tree over all `m^(m-1)` rooted labeled trees, fair flip
    /// bits, uniform assignment.
    pub fn sample<R: Rng + ?Sized>(m: usize, rng: &mut R) -> Result<Self, CipherError> {
        if m == 0 || m > MAX_ZONE_SIZE {
            return Err(CipherError::BadZoneSize(m));
        }
        let prufer: Vec<usize> = (0..m.saturating_sub(2))
            .map(|_| rng.gen_range(0..m))
            .collect();
        let root = rng.gen_range(0..m);
        let tree = RootedTree::from_prufer(&prufer, m, root)?;
        let flips = (0..m).map(|_| rng.gen::<bool>()).collect();
        let mut assignment: Vec<usize> = (0..m).collect();
        assignment.shuffle(rng);
        Self::new(tree, flips, assignment)
    }

    pub fn zone_size(&self) -> usize {
        self.tree.len()
    }

    pub fn tree(&self) -> &RootedTree {
        &self.tree
    }

    pub fn flips(&self) -> &[bool] {
        &self.flips
    }

    /// Node held by each peer.
    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    /// Peer holding `node`.
    pub fn holder_of(&self, node: usize) -> usize {
        self.holder[node]
    }

    pub fn encoded_len(m: usize) -> usize {
        m.saturating_sub(2) + 1 + m.div_ceil(8) + m
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let m = self.zone_size();
        let mut out = Vec::with_capacity(Self::encoded_len(m));
        out.extend(self.tree.prufer().into_iter().map(|v| v as u8));
        out.push(self.tree.root() as u8);
        let mut flips = vec![0u8; m.div_ceil(8)];
        for (i, &f) in self.flips.iter().enumerate() {
            if f {
                flips[i / 8] |= 1 << (i % 8);
            }
        }
        out.extend(flips);
        out.extend(self.assignment.iter().map(|&v| v as u8));
        out
    }

    pub fn from_bytes(bytes: &[u8], m: usize) -> Result<Self, CipherError> {
        if m == 0 || m > MAX_ZONE_SIZE {
            return Err(CipherError::BadZoneSize(m));
        }
        if bytes.len() != Self::encoded_len(m) {
            return Err(CipherError::Decode("wrong length"));
        }
        let (prufer, rest) = bytes.split_at(m.saturating_sub(2));
        let (root, rest) = rest.split_at(1);
        let (flip_bytes, assignment) = rest.split_at(m.div_ceil(8));
        let prufer: Vec<usize> = prufer.iter().map(|&b| b as usize).collect();
        if prufer.iter().any(|&v| v >= m) || root[0] as usize >= m {
            return Err(CipherError::Decode("node index out of range"));
        }
        let tree = RootedTree::from_prufer(&prufer, m, root[0] as usize)
            .map_err(|_| CipherError::Decode("invalid tree"))?;
        let flips: Vec<bool> = (0..m)
            .map(|i| flip_bytes[i / 8] & (1 << (i % 8)) != 0)
            .collect();
        let padding_set =
            (m..flip_bytes.len() * 8).any(|i| flip_bytes[i / 8] & (1 << (i % 8)) != 0);
        if padding_set {
            return Err(CipherError::Decode("nonzero flip padding"));
        }
        let assignment = assignment.iter().map(|&b| b as usize).collect();
        Self::new(tree, flips, assignment).map_err(|_| CipherError::Decode("bad assignment"))
    }
}

/// Number of distinct keys for zone size `m`: `m^(m-1) * 2^m * m!`.
pub fn key_count(m: usize) -> BigUint {
    let m_big = BigUint::from(m);
    let trees = m_big.pow(m.saturating_sub(1) as u32);
    let flips = BigUint::from(1u8) << m;
    let perms: BigUint = (1..=m).map(BigUint::from).product();
    trees * flips * perms
}

/// Every rooted labeled tree on `m` nodes, in Prüfer-code order.
pub fn all_rooted_trees(m: usize) -> Vec<RootedTree> {
    let mut trees = Vec::new();
    let seq_len = m.saturating_sub(2);
    for code in 0..m.pow(seq_len as u32) {
        let prufer: Vec<usize> = (0..seq_len).map(|i| code / m.pow(i as u32) % m).collect();
        for root in 0..m {
            trees.push(RootedTree::from_prufer(&prufer, m, root).unwrap());
        }
    }
    trees
}

/// Every key for zone size `m`, in a fixed order. Only sensible for tiny `m`.
pub fn all_keys(m: usize) -> Vec<CipherKey> {
    let trees = all_rooted_trees(m);
    let perms = permutations(m);
    let mut keys = Vec::new();
    for tree in &trees {
        for mask in 0u32..(1 << m) {
            let flips: Vec<bool> = (0..m).map(|i| mask & (1 << i) != 0).collect();
            for perm in &perms {
                keys.push(CipherKey::new(tree.clone(), flips.clone(), perm.clone()).unwrap());
            }
        }
    }
    keys
}

fn permutations(m: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for v in 0..used.len() {
            if !used[v] {
                used[v] = true;
                prefix.push(v);
                rec(prefix, used, out);
                prefix.pop();
                used[v] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; m], &mut out);
    out
}

/// One peer's share of an encrypted block.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Fragment(#[serde(with = "hex::serde")] pub Vec<u8>);

impl Fragment {
    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

fn xor_into(dst: &mut [u8], src: &[u8]) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d ^= s;
    }
}

fn complement(buf: &mut [u8]) {
    for b in buf {
        *b = !*b;
    }
}

/// Encrypts `block`; element `i` of the result is the fragment for peer `i`.
pub fn encrypt(block: &[u8], key: &CipherKey) -> Result<Vec<Fragment>, CipherError> {
    let m = key.zone_size();
    if !block.len().is_multiple_of(m) {
        return Err(CipherError::UnevenBlock {
            len: block.len(),
            m,
        });
    }
    let width = block.len() / m;
    let plain = |i: usize| &block[i * width..(i + 1) * width];
    let tree = key.tree();
    let root = tree.root();

    let mut code = vec![Vec::new(); m];
    let mut acc = plain(root).to_vec();
    for node in 0..m {
        let Some(parent) = tree.parent(node) else {
            continue;
        };
        let mut c = plain(node).to_vec();
        xor_into(&mut c, plain(parent));
        if key.flips()[node] {
            complement(&mut c);
        }
        xor_into(&mut acc, &c);
        code[node] = c;
    }
    if key.flips()[root] {
        complement(&mut acc);
    }
    code[root] = acc;

    Ok(key
        .assignment()
        .iter()
        .map(|&node| Fragment(code[node].clone()))
        .collect())
}

/// Inverts [`encrypt`]; `fragments[i]` must be peer `i`'s fragment.
pub fn decrypt(fragments: &[Fragment], key: &CipherKey) -> Result<Vec<u8>, CipherError> {
    let m = key.zone_size();
    if fragments.len() != m {
        return Err(CipherError::FragmentCount {
            expected: m,
            got: fragments.len(),
        });
    }
    let width = fragments[0].len();
    if fragments.iter().any(|f| f.len() != width) {
        return Err(CipherError::UnequalFragments);
    }
    let tree = key.tree();
    let root = tree.root();
    let stored = |node: usize| fragments[key.holder_of(node)].as_bytes();

    let mut plain = vec![Vec::new(); m];
    let mut root_plain = stored(root).to_vec();
    if key.flips()[root] {
        complement(&mut root_plain);
    }
    for node in (0..m).filter(|&v| v != root) {
        xor_into(&mut root_plain, stored(node));
    }
    plain[root] = root_plain;
    for &node in &tree.topological_order()[1..] {
        let mut c = stored(node).to_vec();
        if key.flips()[node] {
            complement(&mut c);
        }
        let parent = tree.parent(node).expect("non-root has a parent");
        xor_into(&mut c, &plain[parent]);
        plain[node] = c;
    }
    Ok(plain.concat())
}

/// Whether peers in `corrupted_peers` can rewrite their codewords so that the
/// plaintext changes exactly at `target_change`: every node in the subtree of
/// a changed node, plus the root, must be held by a corrupted peer.
pub fn corruption_oracle(
    key: &CipherKey,
    corrupted_peers: &BTreeSet<usize>,
    target_change: &BTreeSet<usize>,
) -> bool {
    required_rewrites(key.tree(), target_change)
        .into_iter()
        .all(|node| corrupted_peers.contains(&key.holder_of(node)))
}

/// Nodes whose codewords a change at `target_change` forces to be rewritten.
pub fn required_rewrites(tree: &RootedTree, target_change: &BTreeSet<usize>) -> BTreeSet<usize> {
    let mut nodes = BTreeSet::new();
    if target_change.is_empty() {
        return nodes;
    }
    for &t in target_change {
        nodes.extend(tree.subtree(t));
    }
    nodes.insert(tree.root());
    nodes
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::collections::HashMap;

    fn path3() -> RootedTree {
        // root 0 -> 1 -> 2
        RootedTree::from_parents(vec![None, Some(0), Some(1)]).unwrap()
    }

    #[test]
    fn rejects_malformed_trees() {
        assert!(RootedTree::from_parents(vec![]).is_err());
        assert!(RootedTree::from_parents(vec![None, None]).is_err());
        assert!(RootedTree::from_parents(vec![Some(1), Some(0)]).is_err());
        // 1 <-> 2 cycle detached from root 0
        assert!(RootedTree::from_parents(vec![None, Some(2), Some(1)]).is_err());
        assert!(RootedTree::from_parents(vec![None, Some(5)]).is_err());
    }

    #[test]
    fn single_node_key() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let key = CipherKey::sample(1, &mut rng).unwrap();
        assert_eq!(key.tree().root(), 0);
        assert_eq!(key.flips().len(), 1);
        assert_eq!(key.assignment(), &[0]);
        assert!(CipherKey::sample(0, &mut rng).is_err());
    }

    #[test]
    fn single_node_encryption_is_optional_complement() {
        let tree = RootedTree::from_parents(vec![None]).unwrap();
        let block = [0x12, 0x34];
        let plain_key = CipherKey::new(tree.clone(), vec![false], vec![0]).unwrap();
        let flip_key = CipherKey::new(tree, vec![true], vec![0]).unwrap();
        assert_eq!(encrypt(&block, &plain_key).unwrap()[0].0, block);
        assert_eq!(encrypt(&block, &flip_key).unwrap()[0].0, vec![0xED, 0xCB]);
        let fr = [Fragment(vec![0xED, 0xCB])];
        assert_eq!(decrypt(&fr, &flip_key).unwrap(), block);
    }

    #[test]
    fn two_node_hand_example() {
        let tree = RootedTree::from_parents(vec![None, Some(0)]).unwrap();
        let key = CipherKey::new(tree, vec![false, false], vec![0, 1]).unwrap();
        let frags = encrypt(&[0xFF, 0x00], &key).unwrap();
        assert_eq!(frags[1].0, vec![0xFF]);
        assert_eq!(frags[0].0, vec![0x00]);
        assert_eq!(decrypt(&frags, &key).unwrap(), vec![0xFF, 0x00]);
    }

    #[test]
    fn round_trip_random_keys() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for &m in &[1usize, 2, 3, 6, 8] {
            for _ in 0..2_000 {
                let key = CipherKey::sample(m, &mut rng).unwrap();
                let len = m * rng.gen_range(0..5);
                let block: Vec<u8> = (0..len).map(|_| rng.gen()).collect();
                let frags = encrypt(&block, &key).unwrap();
                assert_eq!(frags.len(), m);
                assert_eq!(decrypt(&frags, &key).unwrap(), block);
            }
        }
    }

    #[test]
    fn wrong_key_garbles_block() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut wrong = 0;
        let trials = 10_000;
        for _ in 0..trials {
            let key = CipherKey::sample(6, &mut rng).unwrap();
            let other = CipherKey::sample(6, &mut rng).unwrap();
            let block: Vec<u8> = (0..24).map(|_| rng.gen()).collect();
            let frags = encrypt(&block, &key).unwrap();
            if other != key && decrypt(&frags, &other).unwrap() != block {
                wrong += 1;
            }
        }
        assert!(wrong * 100 >= trials * 99, "only {wrong} garbled");
    }

    #[test]
    fn input_validation() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let key = CipherKey::sample(3, &mut rng).unwrap();
        assert_eq!(
            encrypt(&[1, 2, 3, 4], &key),
            Err(CipherError::UnevenBlock { len: 4, m: 3 })
        );
        let frags = vec![Fragment(vec![1]), Fragment(vec![2])];
        assert_eq!(
            decrypt(&frags, &key),
            Err(CipherError::FragmentCount {
                expected: 3,
                got: 2
            })
        );
        let frags = vec![Fragment(vec![1]), Fragment(vec![2]), Fragment(vec![3, 4])];
        assert_eq!(decrypt(&frags, &key), Err(CipherError::UnequalFragments));
        assert!(CipherKey::new(path3(), vec![false; 3], vec![0, 0, 1]).is_err());
        assert!(CipherKey::new(path3(), vec![false; 2], vec![0, 1, 2]).is_err());
    }

    #[test]
    fn prufer_round_trip_and_cayley_counts() {
        for m in 1..=5usize {
            let mut seen = std::collections::HashSet::new();
            let seq_len = m.saturating_sub(2);
            for code in 0..m.pow(seq_len as u32) {
                let prufer: Vec<usize> = (0..seq_len).map(|i| code / m.pow(i as u32) % m).collect();
                for root in 0..m {
                    let t = RootedTree::from_prufer(&prufer, m, root).unwrap();
                    assert_eq!(t.prufer(), prufer);
                    assert_eq!(t.root(), root);
                    seen.insert(t.parents().to_vec());
                }
            }
            assert_eq!(seen.len(), m.pow(m as u32 - 1));
        }
    }

    #[test]
    fn sampled_trees_are_uniform() {
        // 3-sigma per cell against exact 1 / m^(m-1)
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for (m, cells) in [(2usize, 2usize), (3, 9)] {
            let draws = 100_000;
            let mut counts: HashMap<Vec<Option<usize>>, usize> = HashMap::new();
            for _ in 0..draws {
                let key = CipherKey::sample(m, &mut rng).unwrap();
                *counts.entry(key.tree().parents().to_vec()).or_default() += 1;
            }
            assert_eq!(counts.len(), cells);
            let p = 1.0 / cells as f64;
            let sigma = (p * (1.0 - p) / draws as f64).sqrt();
            for c in counts.values() {
                let freq = *c as f64 / draws as f64;
                assert!((freq - p).abs() <= 3.0 * sigma, "m={m} freq={freq}");
            }
        }
    }

    #[test]
    fn key_space_size() {
        for m in 1..=5 {
            let keys = all_keys(m);
            let distinct: std::collections::HashSet<_> =
                keys.iter().map(|k| k.to_bytes()).collect();
            assert_eq!(BigUint::from(distinct.len()), key_count(m));
            assert!(key_count(m) >= BigUint::from(1u64 << m));
        }
        assert_eq!(key_count(2), BigUint::from(16u32));
        assert_eq!(key_count(3), BigUint::from(9u32 * 8 * 6));
    }

    #[test]
    fn key_encoding_round_trips() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..1_000 {
            let m = rng.gen_range(2..=8);
            let key = CipherKey::sample(m, &mut rng).unwrap();
            let bytes = key.to_bytes();
            assert_eq!(bytes.len(), CipherKey::encoded_len(m));
            assert_eq!(CipherKey::from_bytes(&bytes, m).unwrap(), key);
        }
        let one = CipherKey::sample(1, &mut rng).unwrap();
        assert_eq!(one.to_bytes().len(), 3);
        assert_eq!(CipherKey::from_bytes(&one.to_bytes(), 1).unwrap(), one);
    }

    #[test]
    fn key_decoding_rejects_malformed_input() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let key = CipherKey::sample(5, &mut rng).unwrap();
        let bytes = key.to_bytes();
        assert!(CipherKey::from_bytes(&bytes[..bytes.len() - 1], 5).is_err());
        let mut bad = bytes.clone();
        bad[0] = 9;
        assert!(CipherKey::from_bytes(&bad, 5).is_err());
        let mut bad = bytes.clone();
        let n = bad.len();
        bad[n - 1] = bad[n - 2];
        assert!(CipherKey::from_bytes(&bad, 5).is_err());
        let mut bad = bytes;
        bad[4] |= 0x80; // flip padding
        assert!(CipherKey::from_bytes(&bad, 5).is_err());
    }

    #[test]
    fn oracle_trivial_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let key = CipherKey::sample(5, &mut rng).unwrap();
        let everyone: BTreeSet<_> = (0..5).collect();
        let nobody = BTreeSet::new();
        for t in 0..5 {
            let target = BTreeSet::from([t]);
            assert!(corruption_oracle(&key, &everyone, &target));
            assert!(!corruption_oracle(&key, &nobody, &target));
        }
    }

    #[test]
    fn oracle_on_three_node_path() {
        // peers hold nodes via a non-identity assignment
        let key = CipherKey::new(path3(), vec![false; 3], vec![2, 0, 1]).unwrap();
        let peer_of = |node| key.holder_of(node);
        let target = BTreeSet::from([2]);
        let leaf_and_root = BTreeSet::from([peer_of(2), peer_of(0)]);
        let leaf_only = BTreeSet::from([peer_of(2)]);
        assert!(corruption_oracle(&key, &leaf_and_root, &target));
        assert!(!corruption_oracle(&key, &leaf_only, &target));
    }
}
