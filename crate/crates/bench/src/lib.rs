//! Benchmark fixtures shared by the criterion benches.

use twogroups_core::catalog::{entry_sp4, natural_sl_module};
use twogroups_core::{FieldContext, GModule, Permutation};

/// Sp₄(4) acting on the 255 nonzero vectors of GF(2)⁸.
pub fn sp4_4_permutations() -> (usize, Vec<Permutation>) {
    let perms = entry_sp4(2).and_then(|e| e.module()?.action_permutations()).expect("Sp4(4) entry builds");
    (perms[0].degree(), perms)
}

/// Exterior square of the natural SL₃(4) module viewed over GF(2).
pub fn sl3_4_exterior() -> GModule {
    let field = FieldContext::new(2, None).expect("GF(4)");
    natural_sl_module(3, field).expect("SL3(4) module").restrict_scalars().exterior_square()
}
