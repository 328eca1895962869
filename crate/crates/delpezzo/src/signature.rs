//! Signatures of the ambient lattices and of involution quotients, and the
//! Z/2 G-signature identity packaged as a per-profile "defect budget":
//! `2·σ(quotient) = σ(M) + Σ_C Q([C],[C])` over the orientable surface
//! components of the fixed set (isolated points contribute 0).

use crate::equivariant::FixedSetProfile;
use crate::isometry::Isometry;
use crate::lattice::{eigenlattice, restricted_signature, LorentzianLattice};
use crate::{Error, Result};

/// The signature data of an involution: ambient signature, quotient
/// signature, and the defect total that orientable fixed surfaces must pay.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SignatureBudget {
    pub sigma_m: i64,
    pub sigma_quotient: i64,
    /// `2·sigma_quotient − sigma_m`: the required total of `Q([C],[C])`
    /// over 2-dimensional fixed components.
    pub budget: i64,
    /// The identity applies only to profiles whose surfaces are all
    /// orientable; callers must check the flag against the profile.
    pub orientable_only: bool,
}

/// Signature `p − q` of the full intersection form.
pub fn ambient_signature(lattice: &LorentzianLattice) -> i64 {
    let (p, q, z) = crate::intmat::inertia(lattice.gram());
    debug_assert_eq!(z, 0, "ambient forms are nondegenerate");
    p as i64 - q as i64
}

/// Signature of the form restricted to the +1 eigenlattice of `m`.
pub fn quotient_signature(lattice: &LorentzianLattice, m: &Isometry) -> Result<i64> {
    if !m.is_involution() && !m.is_identity() {
        return Err(Error::NotAnInvolution);
    }
    let fixed = eigenlattice(lattice, m.matrix(), 1);
    let (p, q, _z) = restricted_signature(lattice, &fixed);
    Ok(p as i64 - q as i64)
}

/// The G-signature budget of an involution.
pub fn defect_budget(lattice: &LorentzianLattice, m: &Isometry) -> Result<SignatureBudget> {
    if !m.is_involution() {
        return Err(Error::NotAnInvolution);
    }
    let sigma_m = ambient_signature(lattice);
    let sigma_quotient = quotient_signature(lattice, m)?;
    Ok(SignatureBudget {
        sigma_m,
        sigma_quotient,
        budget: 2 * sigma_quotient - sigma_m,
        orientable_only: true,
    })
}

/// Keep/discard a profile on budget-parity grounds: a profile without
/// surface components cannot pay a nonzero budget.
pub fn parity_prune(b: &SignatureBudget, profile: &FixedSetProfile) -> bool {
    if profile.surface_count() == 0 && b.budget != 0 {
        return false;
    }
    true
}
