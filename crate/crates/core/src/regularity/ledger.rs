//! Exact bookkeeping of `(m, eps, d, delta)` through slicing and sparsification.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::RegularityError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RegularityClass {
    Regular,
    SemiSuper,
    Super,
    HalfSuper,
}

/// Slicing rules for a single regular collection.
#[derive(Clone, Debug, PartialEq)]
pub enum SliceRule {
    /// Sub-pairs of at least an `alpha` fraction: `(eps/alpha, d/2)`.
    Proportional { alpha: BigRational },
    /// Dropping at most an `alpha` fraction of a superregular pair: `(2 eps, d/2)`, stays super.
    NearSpanning { alpha: BigRational },
    /// Uniform random sub-pair of a superregular pair: `(eps/alpha, d^2/16)`, stays super.
    Random { alpha: BigRational },
    /// Half-superregular to superregular by deleting edges: `(eps', d^2/2)`.
    Sparsify { eps_prime: BigRational },
}

/// Slicing rules for templates.
#[derive(Clone, Debug, PartialEq)]
pub enum TemplateSliceRule {
    /// `(alpha m, eps/alpha, d/2, delta/k)`.
    Proportional { alpha: BigRational, k: u32 },
    /// `(m/2, 2 eps, d/2, delta/2)`, stays super. `alpha m` bounds what may be
    /// removed from each cluster.
    NearSpanning { alpha: BigRational },
    /// `(alpha m, eps/alpha, d^2/16, delta/k)`, super in and out.
    Random { alpha: BigRational, k: u32 },
    /// `(m, eps', d^2/2, delta)`, half-super in, super out.
    Sparsify { eps_prime: BigRational },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LineageEntry {
    pub rule: String,
    pub justification: String,
    pub before: [String; 4],
    pub after: [String; 4],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParameterLedger {
    #[serde(with = "rat")]
    pub m: BigRational,
    #[serde(with = "rat")]
    pub eps: BigRational,
    #[serde(with = "rat")]
    pub d: BigRational,
    #[serde(with = "rat")]
    pub delta: BigRational,
    pub class: RegularityClass,
    pub lineage: Vec<LineageEntry>,
}

/// Exact rational from a decimal string such as `"0.01"` or a fraction `"3/7"`.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().ok()?;
        let q: BigInt = q.trim().parse().ok()?;
        return (!q.is_zero()).then(|| BigRational::new(p, q));
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(b) => (true, b),
        None => (false, s),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    let digits = format!("{int}{frac}");
    let num: BigInt = if digits.is_empty() { BigInt::zero() } else { digits.parse().ok()? };
    let den = BigInt::from(10u32).pow(frac.len() as u32);
    let r = BigRational::new(num, den);
    Some(if neg { -r } else { r })
}

/// The decimal value a float prints as (shortest round-trip form), exactly.
pub fn rational_from_f64(x: f64) -> BigRational {
    parse_rational(&format!("{x}")).expect("finite float")
}

pub fn rational_to_f64(r: &BigRational) -> f64 {
    let n: f64 = r.numer().to_string().parse().unwrap_or(f64::NAN);
    let d: f64 = r.denom().to_string().parse().unwrap_or(f64::NAN);
    n / d
}

pub fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl ParameterLedger {
    pub fn new(m: BigRational, eps: BigRational, d: BigRational, delta: BigRational, class: RegularityClass) -> Self {
        Self { m, eps, d, delta, class, lineage: Vec::new() }
    }

    pub fn from_f64(m: f64, eps: f64, d: f64, delta: f64, class: RegularityClass) -> Self {
        Self::new(rational_from_f64(m), rational_from_f64(eps), rational_from_f64(d), rational_from_f64(delta), class)
    }

    fn snapshot(&self) -> [String; 4] {
        [self.m.to_string(), self.eps.to_string(), self.d.to_string(), self.delta.to_string()]
    }

    fn push(mut self, rule: &str, why: &str, next: (BigRational, BigRational, BigRational, BigRational), class: RegularityClass) -> Self {
        let before = self.snapshot();
        (self.m, self.eps, self.d, self.delta) = next;
        self.class = class;
        let after = self.snapshot();
        self.lineage.push(LineageEntry { rule: rule.into(), justification: why.into(), before, after });
        self
    }

    pub fn eps_f64(&self) -> f64 {
        rational_to_f64(&self.eps)
    }

    pub fn d_f64(&self) -> f64 {
        rational_to_f64(&self.d)
    }

    pub fn m_f64(&self) -> f64 {
        rational_to_f64(&self.m)
    }

    pub fn delta_f64(&self) -> f64 {
        rational_to_f64(&self.delta)
    }
}

impl fmt::Display for ParameterLedger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(m={}, eps={}, d={}, delta={}, {:?})", self.m, self.eps, self.d, self.delta, self.class)
    }
}

fn check_alpha(alpha: &BigRational) -> Result<(), RegularityError> {
    if alpha <= &BigRational::zero() || alpha > &BigRational::one() {
        return Err(RegularityError::InvalidParameter(format!("alpha = {alpha} must lie in (0, 1]")));
    }
    Ok(())
}

fn need(rule: &'static str, needs: &'static str, found: RegularityClass, ok: bool) -> Result<(), RegularityError> {
    if ok {
        Ok(())
    } else {
        Err(RegularityError::RuleInapplicable { rule, needs, found })
    }
}

/// Applies a collection slicing rule. `m` and `delta` pass through unchanged.
pub fn ledger_slice(l: &ParameterLedger, rule: &SliceRule) -> Result<ParameterLedger, RegularityError> {
    let two = int(2);
    let l = l.clone();
    let (m, delta) = (l.m.clone(), l.delta.clone());
    Ok(match rule {
        SliceRule::Proportional { alpha } => {
            check_alpha(alpha)?;
            let next = (m, &l.eps / alpha, &l.d / &two, delta);
            l.push("proportional-slice", "sub-tuples of at least an alpha fraction stay regular", next, RegularityClass::Regular)
        }
        SliceRule::NearSpanning { alpha } => {
            check_alpha(alpha)?;
            need("near-spanning-slice", "super", l.class, l.class == RegularityClass::Super)?;
            let next = (m, &l.eps * &two, &l.d / &two, delta);
            l.push("near-spanning-slice", "removing an alpha fraction keeps superregularity", next, RegularityClass::Super)
        }
        SliceRule::Random { alpha } => {
            check_alpha(alpha)?;
            need("random-slice", "super", l.class, l.class == RegularityClass::Super)?;
            let next = (m, &l.eps / alpha, &l.d * &l.d / int(16), delta);
            l.push("random-slice", "uniform random sub-tuples of a superregular tuple stay superregular", next, RegularityClass::Super)
        }
        SliceRule::Sparsify { eps_prime } => {
            need("sparsify", "half-super", l.class, l.class == RegularityClass::HalfSuper)?;
            let next = (m, eps_prime.clone(), &l.d * &l.d / &two, delta);
            l.push("sparsify", "random edge deletion inside regular refinement tuples", next, RegularityClass::Super)
        }
    })
}

/// Applies a template slicing rule.
pub fn ledger_template_slice(l: &ParameterLedger, rule: &TemplateSliceRule) -> Result<ParameterLedger, RegularityError> {
    let two = int(2);
    let l = l.clone();
    Ok(match rule {
        TemplateSliceRule::Proportional { alpha, k } => {
            check_alpha(alpha)?;
            let k = int(i64::from((*k).max(1)));
            let next = (&l.m * alpha, &l.eps / alpha, &l.d / &two, &l.delta / &k);
            l.push("template-proportional-slice", "clusters of between alpha and k alpha of their size", next, RegularityClass::Regular)
        }
        TemplateSliceRule::NearSpanning { alpha } => {
            check_alpha(alpha)?;
            let class = if l.class == RegularityClass::Super { RegularityClass::Super } else { RegularityClass::Regular };
            let next = (&l.m / &two, &l.eps * &two, &l.d / &two, &l.delta / &two);
            l.push("template-near-spanning-slice", "at most alpha m vertices and colours removed per cluster", next, class)
        }
        TemplateSliceRule::Random { alpha, k } => {
            check_alpha(alpha)?;
            need("template-random-slice", "super", l.class, l.class == RegularityClass::Super)?;
            let k = int(i64::from((*k).max(1)));
            let next = (&l.m * alpha, &l.eps / alpha, &l.d * &l.d / int(16), &l.delta / &k);
            l.push("template-random-slice", "uniform random clusters of a super template", next, RegularityClass::Super)
        }
        TemplateSliceRule::Sparsify { eps_prime } => {
            need("template-sparsify", "half-super", l.class, l.class == RegularityClass::HalfSuper)?;
            let next = (l.m.clone(), eps_prime.clone(), &l.d * &l.d / &two, l.delta.clone());
            l.push("template-sparsify", "half-super template sparsified to a super one", next, RegularityClass::Super)
        }
    })
}

mod rat {
    use num_rational::BigRational;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&r.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
        let s = String::deserialize(d)?;
        super::parse_rational(&s).ok_or_else(|| serde::de::Error::custom(format!("not a rational: {s}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> BigRational {
        parse_rational(s).unwrap()
    }

    #[test]
    fn parses_decimals_and_fractions() {
        assert_eq!(q("0.01"), BigRational::new(1.into(), 100.into()));
        assert_eq!(q("3/6"), BigRational::new(1.into(), 2.into()));
        assert_eq!(q("-1.5"), BigRational::new((-3).into(), 2.into()));
        assert_eq!(rational_from_f64(0.1), q("1/10"));
    }

    #[test]
    fn random_slice_needs_super() {
        let l = ParameterLedger::new(int(100), q("0.01"), q("0.4"), q("0.5"), RegularityClass::Regular);
        let err = ledger_slice(&l, &SliceRule::Random { alpha: q("0.5") }).unwrap_err();
        assert!(matches!(err, RegularityError::RuleInapplicable { .. }));
    }

    #[test]
    fn ledger_round_trips_through_json() {
        let l = ParameterLedger::new(int(100), q("0.01"), q("0.4"), q("0.5"), RegularityClass::Super);
        let l = ledger_slice(&l, &SliceRule::Random { alpha: q("0.5") }).unwrap();
        let s = serde_json::to_string(&l).unwrap();
        let back: ParameterLedger = serde_json::from_str(&s).unwrap();
        assert_eq!(back, l);
    }
}
