use super::{
    empirical_exponent, liouville_row, liouville_row_witness, quad_irr_verdict, rational_verdict, DiophantineVerdict,
};
use crate::lattice::PeriodMatrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CertifyConfig {
    /// Search radius for enumerating certifiers.
    pub radius: u32,
    /// Precision passed to gap computations.
    pub depth: u32,
    /// Number of witness terms for strongly approximable structures.
    pub witness_depth: u32,
}

impl Default for CertifyConfig {
    fn default() -> Self {
        CertifyConfig { radius: 32, depth: 20, witness_depth: super::DEFAULT_WITNESS_DEPTH }
    }
}

/// One way of deciding the approximation property of a real structure.
pub trait DiophantineCertifier: Send + Sync {
    fn name(&self) -> &'static str;

    fn applies(&self, a: &PeriodMatrix) -> bool;

    /// Only called when [`applies`](Self::applies) holds.
    fn certify(&self, a: &PeriodMatrix, config: &CertifyConfig) -> DiophantineVerdict;
}

/// Common denominator bound for rational structures.
pub struct RationalCertifier;

/// Minimal-polynomial bound for one row with a quadratic irrational.
pub struct QuadraticCertifier;

/// Factorial-power witness for a row of integer combinations of `L_b`.
pub struct LiouvilleCertifier;

/// Box scan; never decides.
pub struct EmpiricalCertifier;

impl DiophantineCertifier for RationalCertifier {
    fn name(&self) -> &'static str {
        "rational"
    }

    fn applies(&self, a: &PeriodMatrix) -> bool {
        a.is_real() && a.is_rational()
    }

    fn certify(&self, a: &PeriodMatrix, _config: &CertifyConfig) -> DiophantineVerdict {
        rational_verdict(a).expect("applicability checked")
    }
}

impl DiophantineCertifier for QuadraticCertifier {
    fn name(&self) -> &'static str {
        "quadratic"
    }

    fn applies(&self, a: &PeriodMatrix) -> bool {
        quad_irr_verdict(a).is_ok()
    }

    fn certify(&self, a: &PeriodMatrix, _config: &CertifyConfig) -> DiophantineVerdict {
        quad_irr_verdict(a).expect("applicability checked")
    }
}

impl LiouvilleCertifier {
    fn row(a: &PeriodMatrix) -> Option<usize> {
        (0..a.m()).find(|&k| liouville_row(a, k).is_some_and(|(_, parts)| parts.iter().any(|(_, s)| s != &0.into())))
    }
}

impl DiophantineCertifier for LiouvilleCertifier {
    fn name(&self) -> &'static str {
        "liouville"
    }

    fn applies(&self, a: &PeriodMatrix) -> bool {
        Self::row(a).is_some()
    }

    fn certify(&self, a: &PeriodMatrix, config: &CertifyConfig) -> DiophantineVerdict {
        let k = Self::row(a).expect("applicability checked");
        let witness = liouville_row_witness(a, k, config.witness_depth).expect("row checked");
        DiophantineVerdict::StronglySA { witness }
    }
}

impl DiophantineCertifier for EmpiricalCertifier {
    fn name(&self) -> &'static str {
        "empirical"
    }

    fn applies(&self, _a: &PeriodMatrix) -> bool {
        true
    }

    fn certify(&self, a: &PeriodMatrix, config: &CertifyConfig) -> DiophantineVerdict {
        empirical_exponent(a, config.radius, config.depth)
    }
}

/// Certifiers in priority order, addressable by name.
pub struct DiophantineRegistry {
    certifiers: Vec<Box<dyn DiophantineCertifier>>,
}

impl DiophantineRegistry {
    pub fn empty() -> Self {
        DiophantineRegistry { certifiers: Vec::new() }
    }

    pub fn register(&mut self, certifier: Box<dyn DiophantineCertifier>) {
        self.certifiers.retain(|c| c.name() != certifier.name());
        self.certifiers.push(certifier);
    }

    pub fn get(&self, name: &str) -> Option<&dyn DiophantineCertifier> {
        self.certifiers.iter().find(|c| c.name() == name).map(|c| c.as_ref())
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.certifiers.iter().map(|c| c.name()).collect()
    }

    /// Runs the named certifier, or the first applicable one for `"auto"`.
    /// Non-real structures and inapplicable choices give `Undecided`.
    pub fn certify(&self, a: &PeriodMatrix, method: &str, config: &CertifyConfig) -> Option<DiophantineVerdict> {
        if !a.is_real() {
            return Some(DiophantineVerdict::Undecided {
                reason: "the degree-1 criterion is stated for real structures; Im A is nonzero".into(),
            });
        }
        if method == "auto" {
            let chosen = self.certifiers.iter().find(|c| c.applies(a))?;
            return Some(chosen.certify(a, config));
        }
        let c = self.get(method)?;
        Some(if c.applies(a) {
            c.certify(a, config)
        } else {
            DiophantineVerdict::Undecided { reason: format!("certifier '{method}' does not apply to this structure") }
        })
    }
}

impl Default for DiophantineRegistry {
    fn default() -> Self {
        let mut r = Self::empty();
        r.register(Box::new(RationalCertifier));
        r.register(Box::new(QuadraticCertifier));
        r.register(Box::new(LiouvilleCertifier));
        r.register(Box::new(EmpiricalCertifier));
        r
    }
}
