// SPDX-License-Identifier: Apache-2.0

//! Zone-coded ledger simulator: prime-field secret sharing, a rooted-tree
//! XOR cipher, a cyclic zone schedule, the ledger itself with recovery, and
//! the experiments that exercise them.

pub mod cipher;
pub mod field;
pub mod lab;
pub mod ledger;
pub mod mining;
pub mod recovery;
pub mod schedule;
pub mod sharing;
pub mod trials;
