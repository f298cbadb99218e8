//! Cohomology dimension bookkeeping for tube structures over a closed
//! orientable surface of genus `g`.

use thiserror::Error;

use crate::lattice::GammaClass;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SurfaceError {
    #[error("genus {0} is too small; the comparison needs g >= 2")]
    GenusTooSmall(u32),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Tristate {
    Yes,
    No,
    Unknown,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SurfaceProfile {
    pub genus: u32,
    pub gamma_class: GammaClass,
    pub degree1_closed_range: Tristate,
}

/// Dimensions of the mode cohomology `(H⁰, H¹, H²)` at one frequency.
///
/// Inside `Γ` the mode complex is de Rham: `(1, 2g, 1)`. Outside `Γ` it is
/// a twisted complex with `H⁰ = H² = 0`, and the index forces `2g − 2` in
/// degree 1; for `g = 0` every frequency lies in `Γ`, so the off-`Γ` branch
/// is vacuous and reported as `(0, 0, 0)`.
pub fn mode_dims(genus: u32, in_gamma: bool) -> (u64, u64, u64) {
    let g = genus as u64;
    if in_gamma {
        (1, 2 * g, 1)
    } else if g == 0 {
        (0, 0, 0)
    } else {
        (0, 2 * g - 2, 0)
    }
}

pub fn euler_characteristic(genus: u32) -> i64 {
    2 - 2 * genus as i64
}

/// `d0 − d1 + d2 = 2 − 2g` on both branches (the off-`Γ` branch for `g >= 1`).
pub fn euler_index_check(genus: u32) -> bool {
    let alt = |(a, b, c): (u64, u64, u64)| a as i64 - b as i64 + c as i64;
    let chi = euler_characteristic(genus);
    alt(mode_dims(genus, true)) == chi && (genus == 0 || alt(mode_dims(genus, false)) == chi)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DegreeVerdict {
    ZeroSpace,
    FiniteIsoDeRham,
    Infinite,
    ConditionalOnSolvability,
}

impl DegreeVerdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            DegreeVerdict::ZeroSpace => "zero_space",
            DegreeVerdict::FiniteIsoDeRham => "finite_iso_de_rham",
            DegreeVerdict::Infinite => "infinite",
            DegreeVerdict::ConditionalOnSolvability => "conditional_on_solvability",
        }
    }
}

/// Verdicts for `H⁰`, `H¹`, `H²`.
pub fn finiteness_classifier(p: &SurfaceProfile) -> [DegreeVerdict; 3] {
    use DegreeVerdict::*;
    let gamma_zero = p.gamma_class == GammaClass::Zero;
    match p.genus {
        0 => {
            // every closed 1-form is exact, so Γ = Z^m and H¹ vanishes once solvable
            let h1 = match p.degree1_closed_range {
                Tristate::Yes => ZeroSpace,
                Tristate::No => Infinite,
                Tristate::Unknown => ConditionalOnSolvability,
            };
            [Infinite, h1, Infinite]
        }
        1 if !gamma_zero => [Infinite, Infinite, Infinite],
        1 => {
            let conditional = match p.degree1_closed_range {
                Tristate::Yes => FiniteIsoDeRham,
                Tristate::No => Infinite,
                Tristate::Unknown => ConditionalOnSolvability,
            };
            [FiniteIsoDeRham, conditional, ConditionalOnSolvability]
        }
        _ if gamma_zero => [FiniteIsoDeRham, Infinite, FiniteIsoDeRham],
        _ => [Infinite, Infinite, Infinite],
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LambdaClass {
    RationalQ,
    NonLiouvilleIrrational,
    Liouville,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DmFailureSummary {
    pub genus: u32,
    pub lambda_class: LambdaClass,
    pub gamma_class: GammaClass,
    pub closed_range: Tristate,
    pub h1: DegreeVerdict,
    /// Whether `H¹` matches `C^∞(T^r) ⊗ H¹_dR(M)`; `None` when not applicable.
    pub de_rham_iso_holds: Option<bool>,
    pub conclusion: String,
}

/// `ω = λϑ` on a surface of genus `g >= 2`, with `ϑ` a closed 1-form whose
/// periods are integers not all zero.
pub fn dm_failure_summary(genus: u32, lambda_class: LambdaClass) -> Result<DmFailureSummary, SurfaceError> {
    if genus < 2 {
        return Err(SurfaceError::GenusTooSmall(genus));
    }
    let s = match lambda_class {
        LambdaClass::RationalQ => DmFailureSummary {
            genus,
            lambda_class,
            gamma_class: GammaClass::InfiniteProper,
            closed_range: Tristate::Yes,
            h1: DegreeVerdict::Infinite,
            de_rham_iso_holds: None,
            conclusion: "rational λ: Γ != {0}, so the example does not apply".into(),
        },
        LambdaClass::NonLiouvilleIrrational => DmFailureSummary {
            genus,
            lambda_class,
            gamma_class: GammaClass::Zero,
            closed_range: Tristate::Yes,
            h1: DegreeVerdict::Infinite,
            de_rham_iso_holds: Some(false),
            conclusion: format!(
                "Γ = {{0}} and d′ has closed range, yet H¹ is infinite dimensional and cannot be isomorphic to the {}-dimensional H¹_dR(M)",
                2 * genus
            ),
        },
        LambdaClass::Liouville => DmFailureSummary {
            genus,
            lambda_class,
            gamma_class: GammaClass::Zero,
            closed_range: Tristate::No,
            h1: DegreeVerdict::Infinite,
            de_rham_iso_holds: Some(false),
            conclusion: "Liouville λ: d′ does not have closed range in degree 1".into(),
        },
    };
    Ok(s)
}
