//! Experiment configuration files (TOML) and the library objects they
//! describe.

use std::path::{Path, PathBuf};

use formal_powers::geometry::{Domain, Point2};
use formal_powers::problems::{BasisMode, EllipticProblem, ParticularSpec, ProfileInit};
use formal_powers::quadrature::QuadratureRule;
use formal_powers::solver::BoundaryCondition;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub equation: EquationConfig,
    #[serde(default)]
    pub domain: DomainConfig,
    pub solver: SolverConfig,
    #[serde(default)]
    pub quadrature: QuadratureConfig,
    #[serde(default)]
    pub bc: BcConfig,
    #[serde(default)]
    pub reference: ReferenceConfig,
    pub output: OutputConfig,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EquationTag {
    /// `Δu = 0`; in eigen runs `(Δ + λ²)u = 0`.
    Laplace,
    /// `Δu − c²u = 0`.
    Yukawa,
    /// `(−Δ + e^y/4)u = 0`; in eigen runs `(Δ + λ² − e^y/4)u = 0`.
    ExpPotential,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct EquationConfig {
    pub tag: EquationTag,
    pub c: Option<f64>,
    pub lambda_range: Option<[f64; 2]>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DomainTag {
    #[default]
    Disk,
    Ellipse,
    Peaked,
}

#[derive(Clone, Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct DomainConfig {
    #[serde(default)]
    pub kind: DomainTag,
    pub e: Option<f64>,
    pub height: Option<f64>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeTag {
    #[default]
    Auto,
    Exact,
    Numeric,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(default)]
    pub mode: ModeTag,
    /// Collocation points; more than `N + 1` selects least squares.
    pub points: Option<usize>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum QuadratureTag {
    #[default]
    Gauss,
    Spline,
}

#[derive(Clone, Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureConfig {
    /// Gauss nodes per segment, or spline samples.
    pub nodes: Option<usize>,
    #[serde(default)]
    pub mode: QuadratureTag,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OperatorTag {
    #[default]
    Dirichlet,
    Neumann,
}

#[derive(Clone, Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct BcConfig {
    #[serde(default)]
    pub operator: OperatorTag,
}

/// Exact solutions available as boundary data and error reference.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ReferenceTag {
    /// `u = x`, harmonic.
    X,
    /// `u = e^{cx}` for the Yukawa equation.
    ExpCx,
    /// `u = exp(e^{y/2} cos(x/2))` for the exponential potential.
    ExpCos,
}

#[derive(Clone, Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ReferenceConfig {
    pub tag: Option<ReferenceTag>,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub path: PathBuf,
}

fn invalid(field: &str, msg: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("{field}: {msg}"))
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<(Self, String), CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let cfg: ExperimentConfig = toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Ok((cfg, text))
    }

    /// Checks that belong to every subcommand.
    pub fn validate(&self) -> Result<(), CliError> {
        if let Some(c) = self.equation.c {
            if !c.is_finite() {
                return Err(invalid("equation.c", "must be finite"));
            }
        }
        if self.equation.tag == EquationTag::Yukawa && self.equation.c.is_none() {
            return Err(invalid("equation.c", "required for the yukawa equation"));
        }
        match self.domain.kind {
            DomainTag::Ellipse if self.domain.e.is_none() => return Err(invalid("domain.e", "required for an ellipse")),
            DomainTag::Peaked if self.domain.height.is_none() => return Err(invalid("domain.height", "required for a peaked disk")),
            _ => {}
        }
        if let Some(m) = self.solver.points {
            if m < self.solver.n + 1 {
                return Err(invalid("solver.points", format!("{m} is fewer than N + 1 = {}", self.solver.n + 1)));
            }
        }
        if self.quadrature.nodes == Some(0) {
            return Err(invalid("quadrature.nodes", "must be positive"));
        }
        if let Some(r) = self.reference.tag {
            let fits = matches!(
                (r, self.equation.tag),
                (ReferenceTag::X, EquationTag::Laplace) | (ReferenceTag::ExpCx, EquationTag::Yukawa) | (ReferenceTag::ExpCos, EquationTag::ExpPotential)
            );
            if !fits {
                return Err(invalid("reference.tag", format!("{r:?} does not solve the {:?} equation", self.equation.tag)));
            }
        }
        Ok(())
    }

    pub fn lambda_range(&self) -> Result<(f64, f64), CliError> {
        let [a, b] = self
            .equation
            .lambda_range
            .ok_or_else(|| invalid("equation.lambda_range", "required by eigen"))?;
        if !(a > 0.0 && b > a && b.is_finite()) {
            return Err(invalid("equation.lambda_range", format!("[{a}, {b}] must satisfy 0 < min < max")));
        }
        Ok((a, b))
    }

    pub fn c(&self) -> f64 {
        self.equation.c.unwrap_or(0.0)
    }

    pub fn problem(&self) -> EllipticProblem<f64> {
        match self.equation.tag {
            EquationTag::Laplace => EllipticProblem::laplace(),
            EquationTag::Yukawa => EllipticProblem::yukawa(self.c()),
            EquationTag::ExpPotential => second_example(),
        }
    }

    pub fn particular(&self) -> ParticularSpec<f64> {
        match self.equation.tag {
            EquationTag::Laplace => ParticularSpec::Constant,
            EquationTag::Yukawa => ParticularSpec::Exponential,
            EquationTag::ExpPotential => ParticularSpec::Product {
                lambda: 0.0,
                init: ProfileInit::Default,
            },
        }
    }

    pub fn domain(&self) -> Result<Domain<f64>, CliError> {
        Ok(match self.domain.kind {
            DomainTag::Disk => Domain::unit_disk(),
            DomainTag::Ellipse => Domain::ellipse(self.domain.e.unwrap_or(0.0)).map_err(|e| invalid("domain.e", e))?,
            DomainTag::Peaked => Domain::peaked_disk(self.domain.height.unwrap_or(0.0)).map_err(|e| invalid("domain.height", e))?,
        })
    }

    pub fn mode(&self) -> BasisMode {
        match self.solver.mode {
            ModeTag::Auto => BasisMode::Auto,
            ModeTag::Exact => BasisMode::Exact,
            ModeTag::Numeric => BasisMode::Numeric,
        }
    }

    pub fn rule(&self) -> QuadratureRule {
        match self.quadrature.mode {
            QuadratureTag::Gauss => self.quadrature.nodes.map(QuadratureRule::gauss).unwrap_or_default(),
            QuadratureTag::Spline => QuadratureRule::spline(self.quadrature.nodes.unwrap_or(QuadratureRule::default().spline_samples)),
        }
    }

    pub fn points(&self) -> usize {
        self.solver.points.unwrap_or(self.solver.n + 1)
    }

    /// Boundary data taken from the reference solution.
    pub fn boundary_condition(&self) -> Result<BoundaryCondition<f64>, CliError> {
        let r = self
            .reference
            .tag
            .ok_or_else(|| invalid("reference.tag", "required by bvp (it supplies the boundary data)"))?;
        let exact = Exact::new(r, self.c());
        Ok(match self.bc.operator {
            OperatorTag::Dirichlet => BoundaryCondition::dirichlet(move |z| exact.value(z)),
            OperatorTag::Neumann => {
                let bc = BoundaryCondition::neumann_from_gradient(move |z| exact.gradient(z));
                if self.problem().q_vanishes() {
                    bc.with_pin(move |z| exact.value(z))
                } else {
                    bc
                }
            }
        })
    }
}

/// `(−Δ + e^y/4)u = 0`.
pub fn second_example() -> EllipticProblem<f64> {
    EllipticProblem::schrodinger_y(|y: f64| y.exp() / 4.0)
}

/// A closed-form solution with its gradient.
#[derive(Clone, Copy, Debug)]
pub struct Exact {
    tag: ReferenceTag,
    c: f64,
}

impl Exact {
    pub fn new(tag: ReferenceTag, c: f64) -> Self {
        Exact { tag, c }
    }

    pub fn value(&self, z: Point2<f64>) -> f64 {
        match self.tag {
            ReferenceTag::X => z.re,
            ReferenceTag::ExpCx => (self.c * z.re).exp(),
            ReferenceTag::ExpCos => ((z.im / 2.0).exp() * (z.re / 2.0).cos()).exp(),
        }
    }

    pub fn gradient(&self, z: Point2<f64>) -> (f64, f64) {
        match self.tag {
            ReferenceTag::X => (1.0, 0.0),
            ReferenceTag::ExpCx => (self.c * (self.c * z.re).exp(), 0.0),
            ReferenceTag::ExpCos => {
                let g = (z.im / 2.0).exp();
                let u = self.value(z);
                (-0.5 * u * g * (z.re / 2.0).sin(), 0.5 * u * g * (z.re / 2.0).cos())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<ExperimentConfig, String> {
        toml::from_str(text).map_err(|e| e.to_string())
    }

    const BASE: &str = r#"
[equation]
tag = "yukawa"
c = 1.0
[solver]
N = 8
[reference]
tag = "exp_cx"
[output]
path = "out.csv"
"#;

    #[test]
    fn defaults_and_accessors() {
        let cfg = parse(BASE).unwrap();
        cfg.validate().unwrap();
        assert_eq!(cfg.points(), 9);
        assert_eq!(cfg.mode(), BasisMode::Auto);
        assert_eq!(cfg.rule(), QuadratureRule::default());
        assert_eq!(cfg.bc.operator, OperatorTag::Dirichlet);
        assert!(matches!(cfg.domain().unwrap().kind(), formal_powers::geometry::DomainKind::Disk));
    }

    #[test]
    fn unknown_keys_and_tags_are_rejected() {
        assert!(parse(&BASE.replace("c = 1.0", "c = 1.0\nd = 2.0")).unwrap_err().contains("unknown field"));
        assert!(parse(&BASE.replace("\"yukawa\"", "\"heat\"")).unwrap_err().contains("unknown variant"));
    }

    #[test]
    fn field_level_validation() {
        let msg = |text: &str| parse(text).unwrap().validate().unwrap_err().to_string();
        assert!(msg(&BASE.replace("c = 1.0\n", "")).contains("equation.c"));
        assert!(msg(&BASE.replace("N = 8", "N = 8\npoints = 4")).contains("solver.points"));
        assert!(msg(&BASE.replace("\"exp_cx\"", "\"exp_cos\"")).contains("reference.tag"));
        assert!(msg(&BASE.replace("[solver]", "[domain]\nkind = \"ellipse\"\n[solver]")).contains("domain.e"));
    }

    #[test]
    fn lambda_range_checks() {
        let with = |r: &str| parse(&BASE.replace("c = 1.0", &format!("c = 1.0\nlambda_range = {r}"))).unwrap();
        assert_eq!(with("[2.0, 7.0]").lambda_range().unwrap(), (2.0, 7.0));
        assert!(with("[7.0, 2.0]").lambda_range().is_err());
        assert!(with("[0.0, 2.0]").lambda_range().is_err());
        assert!(parse(BASE).unwrap().lambda_range().is_err());
    }

    #[test]
    fn exact_gradients_match_differences() {
        let h = 1e-6;
        for (tag, c) in [(ReferenceTag::X, 0.0), (ReferenceTag::ExpCx, 1.7), (ReferenceTag::ExpCos, 0.0)] {
            let u = Exact::new(tag, c);
            let z = Point2::new(0.3, -0.4);
            let (gx, gy) = u.gradient(z);
            let dx = (u.value(z + h) - u.value(z - h)) / (2.0 * h);
            let dy = (u.value(z + Point2::new(0.0, h)) - u.value(z - Point2::new(0.0, h))) / (2.0 * h);
            assert!((gx - dx).abs() < 1e-8 && (gy - dy).abs() < 1e-8, "{tag:?}");
        }
    }
}
