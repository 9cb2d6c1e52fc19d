//! Reproduction runs for the published tables. Reference values and
//! tolerances come from the CSV files under `data/`.

use std::time::Instant;

use formal_powers::geometry::{Domain, Point2};
use formal_powers::problems::{complete_system, particular_solution, BasisMode, EllipticProblem, FormalPowerBasis, ParticularSpec, ProfileInit};
use formal_powers::quadrature::QuadratureRule;
use formal_powers::solver::{
    assemble, basis_disagreement, error_grid, find_eigenvalues, max_abs_error, solve_bvp, ApproximateSolution, BoundaryCondition, EigenSetup,
    SolveMode, DEFAULT_GRID_STEP,
};

use crate::config::{second_example, Exact, ReferenceTag};
use crate::output::ResultRow;
use crate::CliError;

/// A row without its own tolerance passes when the measured error is
/// within this factor of the published one.
pub const FALLBACK_FACTOR: f64 = 100.0;
/// Absolute slack added to the fallback so rows published at rounding
/// level are not judged on rounding noise.
pub const FALLBACK_FLOOR: f64 = 1e-13;

pub const TABLE_IDS: [&str; 9] = ["1", "2", "3", "5", "6", "7", "8", "9", "eigen"];

#[derive(Clone, Debug, PartialEq)]
pub struct Reference {
    pub key: String,
    pub value: f64,
    pub tolerance: Option<f64>,
}

impl Reference {
    /// Numeric part of a `name=value` key.
    fn param(&self) -> Result<f64, CliError> {
        self.key
            .split_once('=')
            .and_then(|(_, v)| v.parse().ok())
            .ok_or_else(|| CliError::Data(format!("row key {:?} is not name=value", self.key)))
    }
}

pub fn reference_data(id: &str) -> Result<&'static str, CliError> {
    Ok(match id {
        "1" => include_str!("../data/table1.csv"),
        "2" => include_str!("../data/table2.csv"),
        "3" => include_str!("../data/table3.csv"),
        "5" => include_str!("../data/table5.csv"),
        "6" => include_str!("../data/table6.csv"),
        "7" => include_str!("../data/table7.csv"),
        "8" => include_str!("../data/table8.csv"),
        "9" => include_str!("../data/table9.csv"),
        "eigen" => include_str!("../data/eigen.csv"),
        "4" => return Err(CliError::Usage("table 4 is reference data only (data/table4.csv); its finite-element column cannot be recomputed".into())),
        other => return Err(CliError::Usage(format!("unknown table {other:?}; expected one of {}", TABLE_IDS.join(", ")))),
    })
}

pub fn parse_references(text: &str) -> Result<Vec<Reference>, CliError> {
    let mut rd = csv::ReaderBuilder::new().comment(Some(b'#')).trim(csv::Trim::All).from_reader(text.as_bytes());
    let mut out = Vec::new();
    for rec in rd.records() {
        let rec = rec.map_err(|e| CliError::Data(e.to_string()))?;
        let num = |s: &str| s.parse::<f64>().map_err(|e| CliError::Data(format!("{s:?}: {e}")));
        let tol = rec.get(2).unwrap_or("");
        out.push(Reference {
            key: rec.get(0).unwrap_or("").to_string(),
            value: num(rec.get(1).unwrap_or(""))?,
            tolerance: if tol.is_empty() { None } else { Some(num(tol)?) },
        });
    }
    Ok(out)
}

/// `measured ≤ tolerance`, or the fallback rule when the row has none.
pub fn bound_check(measured: f64, r: &Reference) -> (Option<f64>, bool) {
    match r.tolerance {
        Some(t) => (Some(t), measured <= t),
        None => {
            let t = FALLBACK_FACTOR * r.value + FALLBACK_FLOOR;
            (Some(t), measured <= t)
        }
    }
}

fn attach(mut row: ResultRow, r: &Reference, seconds: f64) -> ResultRow {
    let (tol, pass) = bound_check(row.measured.unwrap_or(f64::INFINITY), r);
    row.reference = Some(r.value);
    row.tolerance = tol;
    row.pass = Some(pass);
    row.seconds = seconds;
    row
}

fn yukawa_basis(domain: &Domain<f64>, c: f64, n: usize, mode: BasisMode) -> Result<FormalPowerBasis<f64>, CliError> {
    let ps = particular_solution(&EllipticProblem::yukawa(c), &ParticularSpec::Exponential, domain)?;
    Ok(complete_system(&ps, domain, n, mode, &QuadratureRule::default())?)
}

fn dirichlet(basis: &FormalPowerBasis<f64>, exact: Exact) -> Result<(ApproximateSolution<f64>, f64), CliError> {
    let sys = assemble(basis, &BoundaryCondition::dirichlet(move |z| exact.value(z)), basis.len())?;
    let sol = solve_bvp(&sys, SolveMode::Square)?;
    let err = max_abs_error(&sol, &|z: Point2<f64>| exact.value(z), &error_grid(basis.domain()))?;
    Ok((sol, err))
}

/// Coefficient of `u_k` in `e^{cx} = Σ b_k u_k`: `b_0 = 1`,
/// `b_{2n−1} = b_{2n} = cⁿ/n!`.
pub fn yukawa_coefficient(c: f64, k: usize) -> f64 {
    (1..=k.div_ceil(2)).fold(1.0, |acc, i| acc * c / i as f64)
}

fn table1(refs: &[Reference]) -> Result<Vec<ResultRow>, CliError> {
    let disk = Domain::unit_disk();
    let coefficients = |c: f64| -> Result<Vec<f64>, CliError> {
        let b = yukawa_basis(&disk, c, 34, BasisMode::Exact)?;
        Ok(dirichlet(&b, Exact::new(ReferenceTag::ExpCx, c))?.0.coefficients().to_vec())
    };
    let t = Instant::now();
    let b5 = coefficients(5.0)?;
    let b1 = coefficients(1.0)?;
    let shared = t.elapsed().as_secs_f64() / refs.len() as f64;
    let mut rows = Vec::new();
    for r in refs {
        let mut row = if r.key == "all" {
            let worst = b1.iter().enumerate().map(|(k, v)| (v - yukawa_coefficient(1.0, k)).abs()).fold(0.0, f64::max);
            let mut row = ResultRow::new("table1", "max_coefficient_error", worst);
            row.c = Some(1.0);
            row
        } else {
            let k = r.param()? as usize;
            let b = *b5.get(k).ok_or_else(|| CliError::Data(format!("k={k} exceeds N=34")))?;
            let mut row = ResultRow::new("table1", "coefficient_error", (b - yukawa_coefficient(5.0, k)).abs());
            row.c = Some(5.0);
            row.k = Some(k);
            row
        };
        row.n = Some(34);
        rows.push(attach(row, r, shared));
    }
    Ok(rows)
}

fn yukawa_sweep(id: &str, c: f64, refs: &[Reference]) -> Result<Vec<ResultRow>, CliError> {
    let disk = Domain::unit_disk();
    let mut rows = Vec::new();
    for r in refs {
        let n = r.param()? as usize;
        let t = Instant::now();
        let (_, err) = dirichlet(&yukawa_basis(&disk, c, n, BasisMode::Exact)?, Exact::new(ReferenceTag::ExpCx, c))?;
        let mut row = ResultRow::new(id, "max_abs_error", err);
        row.n = Some(n);
        row.c = Some(c);
        rows.push(attach(row, r, t.elapsed().as_secs_f64()));
    }
    Ok(rows)
}

fn shaped(id: &str, n: usize, refs: &[Reference], make: impl Fn(f64) -> formal_powers::Result<Domain<f64>>) -> Result<Vec<ResultRow>, CliError> {
    let mut rows = Vec::new();
    for r in refs {
        let p = r.param()?;
        let t = Instant::now();
        let domain = make(p)?;
        let (_, err) = dirichlet(&yukawa_basis(&domain, 1.0, n, BasisMode::Auto)?, Exact::new(ReferenceTag::ExpCx, 1.0))?;
        let mut row = ResultRow::new(id, "max_abs_error", err);
        row.n = Some(n);
        row.c = Some(1.0);
        if id == "table6" {
            row.e = Some(p);
        } else {
            row.height = Some(p);
        }
        rows.push(attach(row, r, t.elapsed().as_secs_f64()));
    }
    Ok(rows)
}

fn table8(refs: &[Reference]) -> Result<Vec<ResultRow>, CliError> {
    let disk = Domain::unit_disk();
    let t = Instant::now();
    let exact = yukawa_basis(&disk, 1.0, 20, BasisMode::Exact)?;
    let numeric = yukawa_basis(&disk, 1.0, 20, BasisMode::Numeric)?;
    let d = basis_disagreement(&exact, &numeric, &error_grid(&disk))?;
    let shared = t.elapsed().as_secs_f64() / refs.len() as f64;
    let mut rows = Vec::new();
    for r in refs {
        let (k, quantity, v) = if r.key == "weighted" {
            let w: f64 = (1..=10).map(f64::from).product();
            (20, "weighted_basis_difference", d[20] / w)
        } else {
            let k = r.param()? as usize;
            let v = *d.get(k).ok_or_else(|| CliError::Data(format!("k={k} exceeds N=20")))?;
            (k, "basis_difference", v)
        };
        let mut row = ResultRow::new("table8", quantity, v);
        row.n = Some(20);
        row.c = Some(1.0);
        row.k = Some(k);
        rows.push(attach(row, r, shared));
    }
    Ok(rows)
}

fn table9(refs: &[Reference]) -> Result<Vec<ResultRow>, CliError> {
    let disk = Domain::unit_disk();
    let spec = ParticularSpec::Product {
        lambda: 0.0,
        init: ProfileInit::Default,
    };
    let ps = particular_solution(&second_example(), &spec, &disk)?;
    let mut rows = Vec::new();
    for r in refs {
        let n = r.param()? as usize;
        let t = Instant::now();
        let basis = complete_system(&ps, &disk, n, BasisMode::Auto, &QuadratureRule::default())?;
        let (_, err) = dirichlet(&basis, Exact::new(ReferenceTag::ExpCos, 0.0))?;
        let mut row = ResultRow::new("table9", "max_abs_error", err);
        row.n = Some(n);
        rows.push(attach(row, r, t.elapsed().as_secs_f64()));
    }
    Ok(rows)
}

/// Sizes scanned for the eigen table.
pub const EIGEN_SIZES: [usize; 2] = [21, 23];
pub const EIGEN_RANGE: (f64, f64) = (2.0, 7.0);

fn eigen(refs: &[Reference]) -> Result<Vec<ResultRow>, CliError> {
    let mut rows = Vec::new();
    for n in EIGEN_SIZES {
        let t = Instant::now();
        let setup = EigenSetup::new(EllipticProblem::laplace(), Domain::unit_disk(), n);
        let scan = find_eigenvalues(&setup, EIGEN_RANGE, DEFAULT_GRID_STEP, None)?;
        let shared = t.elapsed().as_secs_f64() / refs.len().max(scan.roots.len()) as f64;
        let count = refs.len().max(scan.roots.len());
        for i in 0..count {
            let root = scan.roots.get(i);
            let mut row = ResultRow {
                experiment: "eigen".into(),
                quantity: "lambda".into(),
                n: Some(n),
                k: Some(i + 1),
                measured: root.map(|r| r.lambda),
                indicator: root.map(|r| r.indicator),
                width: root.map(|r| r.width),
                seconds: shared,
                ..Default::default()
            };
            if let Some(r) = refs.get(i) {
                let tol = r.tolerance.ok_or_else(|| CliError::Data(format!("eigen row {} needs a tolerance", r.key)))?;
                row.reference = Some(r.value);
                row.tolerance = Some(tol);
                row.pass = Some(root.is_some_and(|x| (x.lambda - r.value).abs() <= tol));
            }
            rows.push(row);
        }
    }
    Ok(rows)
}

pub fn run_table(id: &str) -> Result<Vec<ResultRow>, CliError> {
    let refs = parse_references(reference_data(id)?)?;
    match id {
        "1" => table1(&refs),
        "2" => yukawa_sweep("table2", 1.0, &refs),
        "3" => yukawa_sweep("table3", 5.0, &refs),
        "5" => yukawa_sweep("table5", 10.0, &refs),
        "6" => shaped("table6", 30, &refs, Domain::ellipse),
        "7" => shaped("table7", 31, &refs, Domain::peaked_disk),
        "8" => table8(&refs),
        "9" => table9(&refs),
        _ => eigen(&refs),
    }
}
