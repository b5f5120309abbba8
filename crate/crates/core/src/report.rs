//! Itemized energy-bound reports with exact rational exponents.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::Ratio;
use serde::{Serialize, Serializer};

/// Exponent of the large parameter (`n`, `N` or `ρ`) carried by a term.
pub type Exponent = Ratio<i64>;

pub fn ratio(num: i64, den: i64) -> Exponent {
    Ratio::new(num, den)
}

/// `"7/5"`, or `"2"` for integers.
pub fn format_exponent(e: &Exponent) -> String {
    if *e.denom() == 1 {
        e.numer().to_string()
    } else {
        format!("{}/{}", e.numer(), e.denom())
    }
}

fn serialize_exponent<S: Serializer>(e: &Option<Exponent>, s: S) -> Result<S::Ok, S::Error> {
    match e {
        Some(e) => s.serialize_str(&format_exponent(e)),
        None => s.serialize_none(),
    }
}

/// Label of the identity or estimate a report term is drawn from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum EqTag {
    #[serde(rename = "<N>")]
    ExpectedNumber,
    #[serde(rename = "<T>")]
    KineticEnergy,
    #[serde(rename = "<H>")]
    Energy,
    #[serde(rename = "trgamma")]
    TraceGamma,
    #[serde(rename = "Nexpec")]
    NumberAsymptotics,
    #[serde(rename = "kineticexpec")]
    KineticExpectation,
    #[serde(rename = "coulombexpecfinal")]
    CoulombLowerBound,
    #[serde(rename = "tkt")]
    PacketKernel,
    #[serde(rename = "p-2approx")]
    ConvolutionEstimate,
    #[serde(rename = "g-energy")]
    PairingEnergy,
    #[serde(rename = "upperwitherror")]
    UpperWithError,
    #[serde(rename = "largemexpec")]
    LargeNumberTail,
    #[serde(rename = "fixedN")]
    FixedNumber,
    #[serde(rename = "z0def")]
    Neutrality,
    #[serde(rename = "etakin")]
    EdgeKinetic,
    #[serde(rename = "mismatch")]
    Mismatch,
    #[serde(rename = "gammakin1")]
    KineticOneComponent,
    #[serde(rename = "exchange")]
    Exchange,
    #[serde(rename = "Jnorm")]
    JProfile,
    #[serde(rename = "coulombexpecfinal1")]
    CoulombOneComponent,
    #[serde(rename = "foldy")]
    FoldyLimit,
}

impl EqTag {
    pub fn label(self) -> &'static str {
        match self {
            Self::ExpectedNumber => "<N>",
            Self::KineticEnergy => "<T>",
            Self::Energy => "<H>",
            Self::TraceGamma => "trgamma",
            Self::NumberAsymptotics => "Nexpec",
            Self::KineticExpectation => "kineticexpec",
            Self::CoulombLowerBound => "coulombexpecfinal",
            Self::PacketKernel => "tkt",
            Self::ConvolutionEstimate => "p-2approx",
            Self::PairingEnergy => "g-energy",
            Self::UpperWithError => "upperwitherror",
            Self::LargeNumberTail => "largemexpec",
            Self::FixedNumber => "fixedN",
            Self::Neutrality => "z0def",
            Self::EdgeKinetic => "etakin",
            Self::Mismatch => "mismatch",
            Self::KineticOneComponent => "gammakin1",
            Self::Exchange => "exchange",
            Self::JProfile => "Jnorm",
            Self::CoulombOneComponent => "coulombexpecfinal1",
            Self::FoldyLimit => "foldy",
        }
    }
}

impl fmt::Display for EqTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TermKind {
    /// Leading contribution.
    Main,
    /// Computed lower-order contribution.
    Correction,
    /// Estimate carrying an unspecified constant.
    Error,
    /// Reported for reference, not part of the total.
    Info,
}

/// An unspecified constant as it enters a term: its name and the value used.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NamedConstant {
    pub name: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundTerm {
    pub name: String,
    pub kind: TermKind,
    pub value: f64,
    pub tag: EqTag,
    #[serde(serialize_with = "serialize_exponent")]
    pub exponent: Option<Exponent>,
    pub constant: Option<NamedConstant>,
}

impl BoundTerm {
    pub fn new(
        name: &str,
        kind: TermKind,
        value: f64,
        tag: EqTag,
        exponent: Option<Exponent>,
    ) -> Self {
        Self {
            name: name.to_string(),
            kind,
            value,
            tag,
            exponent,
            constant: None,
        }
    }

    pub fn with_constant(mut self, name: &str, value: f64) -> Self {
        self.constant = Some(NamedConstant {
            name: name.to_string(),
            value,
        });
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub title: String,
    /// Name of the large parameter the exponents refer to.
    pub parameter: String,
    pub parameter_value: f64,
    pub terms: Vec<BoundTerm>,
    pub total: f64,
    pub main: f64,
    /// `(total − main) / |main|`.
    pub residual_ratio: f64,
}

impl BoundReport {
    pub fn new(title: &str, parameter: &str, parameter_value: f64, terms: Vec<BoundTerm>) -> Self {
        let total = terms
            .iter()
            .filter(|t| t.kind != TermKind::Info)
            .map(|t| t.value)
            .sum();
        let main: f64 = terms
            .iter()
            .filter(|t| t.kind == TermKind::Main)
            .map(|t| t.value)
            .sum();
        Self {
            title: title.to_string(),
            parameter: parameter.to_string(),
            parameter_value,
            terms,
            total,
            main,
            residual_ratio: if main != 0.0 {
                (total - main) / main.abs()
            } else {
                0.0
            },
        }
    }

    pub fn term(&self, name: &str) -> Option<&BoundTerm> {
        self.terms.iter().find(|t| t.name == name)
    }
}

/// Values for the unspecified constants of the estimates. Missing names
/// default to 1.
#[derive(Debug, Clone, Default, PartialEq, Serialize, serde::Deserialize)]
#[serde(transparent)]
pub struct Constants(pub BTreeMap<String, f64>);

impl Constants {
    pub fn get(&self, name: &str) -> f64 {
        self.0.get(name).copied().unwrap_or(1.0)
    }

    pub fn all_zero(names: &[&str]) -> Self {
        Self(names.iter().map(|n| (n.to_string(), 0.0)).collect())
    }

    pub fn set(&mut self, name: &str, value: f64) {
        self.0.insert(name.to_string(), value);
    }
}
