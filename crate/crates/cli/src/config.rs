//! Problem configuration read from TOML.

use std::path::Path;

use cycpair::exact::Rational;
use cycpair::poly::{WPoly, WeightSystem};
use serde::Deserialize;

use crate::error::CliError;

/// One term `(coefficient, exponent vector)`; the coefficient is an integer or
/// a `"p/q"` string.
#[derive(Clone, Debug, Deserialize)]
pub struct Term(pub Coefficient, pub Vec<u32>);

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum Coefficient {
    Int(i64),
    Text(String),
}

impl Coefficient {
    fn value(&self) -> Result<Rational, CliError> {
        match self {
            Coefficient::Int(k) => Ok(Rational::from_int(*k)),
            Coefficient::Text(s) => s.parse().map_err(|e| CliError::Config(format!("{e}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum ZLiftKind {
    #[default]
    Exponential,
    Solved,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Cutoffs {
    /// Longest bar tensor tried when searching for cycles.
    pub length_cap: usize,
    /// Largest unrestricted slice handed to the exact solver.
    pub slice_cap: usize,
    pub weight_window: Option<[i64; 2]>,
    pub margin: Option<i64>,
    /// Chern character truncation.
    pub u_order: usize,
    /// `u`-order of the cycle lifts for the flatness check.
    pub lift_order: usize,
    pub z_order: usize,
    pub z_lift: ZLiftKind,
    pub seed: u64,
    pub samples: usize,
    /// Longest random tensor in the identity suite.
    pub max_length: usize,
    /// `A_f` enters the identity suite modulo `(x)^truncation`.
    pub truncation: u32,
}

impl Default for Cutoffs {
    fn default() -> Self {
        Cutoffs {
            length_cap: 3,
            slice_cap: 20_000,
            weight_window: None,
            margin: None,
            u_order: 3,
            lift_order: 1,
            z_order: 3,
            z_lift: ZLiftKind::Exponential,
            seed: 0,
            samples: 100,
            max_length: 4,
            truncation: 2,
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    pub n: usize,
    pub weights: Vec<i64>,
    pub f: Vec<Term>,
    /// Decomposition `f = sum x_i f_i`.
    #[serde(default)]
    pub parts: Option<Vec<Vec<Term>>>,
    /// Central element `g` for the flatness check.
    #[serde(default)]
    pub central: Option<Vec<Term>>,
    #[serde(default)]
    pub cutoffs: Cutoffs,
}

/// The validated polynomial data of a config.
pub struct Problem {
    pub f: WPoly,
    pub ws: WeightSystem,
    pub parts: Option<Vec<WPoly>>,
    pub central: Option<WPoly>,
}

impl ProblemConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    fn poly(&self, terms: &[Term]) -> Result<WPoly, CliError> {
        let mut p = WPoly::zero(self.n);
        for Term(c, e) in terms {
            if e.len() != self.n {
                return Err(CliError::Config(format!("exponent {e:?} has {} entries, expected {}", e.len(), self.n)));
            }
            p.add_term(e.clone(), c.value()?);
        }
        Ok(p)
    }

    /// Parses `f`, infers `W` from its first term and checks quasi-homogeneity.
    pub fn problem(&self) -> Result<Problem, CliError> {
        if self.weights.len() != self.n {
            return Err(CliError::Config(format!("{} weights for n = {}", self.weights.len(), self.n)));
        }
        if self.weights.iter().any(|&w| w <= 0) {
            return Err(CliError::Config("weights must be positive".into()));
        }
        let f = self.poly(&self.f)?;
        let Some((e, _)) = f.terms().next() else {
            return Err(CliError::Config("f is zero".into()));
        };
        let total: i64 = e.iter().zip(&self.weights).map(|(&a, &w)| a as i64 * w).sum();
        let ws = WeightSystem::new(self.weights.clone(), total).map_err(|e| CliError::Config(e.to_string()))?;
        if f.weight(&ws).is_none() {
            return Err(CliError::Config("not quasi-homogeneous".into()));
        }
        let parts = match &self.parts {
            Some(ps) => Some(ps.iter().map(|p| self.poly(p)).collect::<Result<Vec<_>, _>>()?),
            None => None,
        };
        let central = match &self.central {
            Some(g) => Some(self.poly(g)?),
            None => None,
        };
        Ok(Problem { f, ws, parts, central })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_terms_and_cutoffs() {
        let c = ProblemConfig::parse(
            r#"
            n = 2
            weights = [1, 1]
            f = [[1, [3, 0]], ["1/1", [0, 3]]]
            [cutoffs]
            seed = 7
            weight_window = [-4, 4]
            "#,
        )
        .unwrap();
        assert_eq!(c.cutoffs.seed, 7);
        assert_eq!(c.cutoffs.weight_window, Some([-4, 4]));
        let p = c.problem().unwrap();
        assert_eq!(p.ws.total(), 6);
        assert_eq!(p.f.len(), 2);
    }

    #[test]
    fn mixed_weights_are_rejected() {
        let c = ProblemConfig::parse("n = 1\nweights = [1]\nf = [[1, [3]], [1, [2]]]").unwrap();
        match c.problem() {
            Err(CliError::Config(m)) => assert_eq!(m, "not quasi-homogeneous"),
            _ => panic!("expected a config error"),
        }
    }

    #[test]
    fn unknown_keys_are_config_errors() {
        assert!(matches!(ProblemConfig::parse("n = 1\nweights = [1]\nf = [[1, [2]]]\nfoo = 3"), Err(CliError::Config(_))));
    }
}
