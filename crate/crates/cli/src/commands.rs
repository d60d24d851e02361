use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map, Value};

use vessel_core::charfun::{self, CurvePoint};
use vessel_core::io::{
    complex_json, matrix_json, num, ColligationRecord, Document, Payload, VesselRecord,
};
use vessel_core::kernels::{self, Region};
use vessel_core::{colligation, coupling, realization, sys2d, vessel};
use vessel_core::{Error, Result, Side, Vessel, C64};

use crate::report::Format;
use crate::{Cli, Command, SideArg};

pub struct Report {
    pub body: Value,
    /// Replaces `body` when the report is written as CSV.
    pub table: Option<Value>,
    pub pass: bool,
    pub default_format: Format,
}

impl Report {
    fn ok(body: Value) -> Self {
        Self::verdict(body, true)
    }

    fn verdict(body: Value, pass: bool) -> Self {
        Self { body, table: None, pass, default_format: Format::Json }
    }
}

fn read_document(path: &str) -> Result<Document> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Schema(format!("cannot read {path}: {e}")))?;
    Document::parse(&text)
}

fn read_vessel(path: &str) -> Result<Vessel> {
    read_document(path)?.vessel()
}

fn parse_pair(s: &str, what: &str) -> Result<(f64, f64)> {
    let bad = || Error::Schema(format!("{what}: expected two finite numbers `a,b`, got {s:?}"));
    let (a, b) = s.split_once(',').ok_or_else(bad)?;
    let a: f64 = a.trim().parse().map_err(|_| bad())?;
    let b: f64 = b.trim().parse().map_err(|_| bad())?;
    if a.is_finite() && b.is_finite() {
        Ok((a, b))
    } else {
        Err(bad())
    }
}

fn parse_complex(s: &str, what: &str) -> Result<C64> {
    parse_pair(s, what).map(|(re, im)| C64::new(re, im))
}

fn finite(x: f64, what: &str) -> Result<f64> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(Error::Schema(format!("{what} must be finite")))
    }
}

fn point_json(p: &CurvePoint) -> Value {
    json!([complex_json(p.l1), complex_json(p.l2)])
}

fn vessel_document(v: &Vessel) -> Value {
    Document::new(Payload::Vessel(VesselRecord::from_vessel(v))).to_json()
}

pub fn dispatch(cli: &Cli) -> Result<Report> {
    let tol = finite(cli.tol, "--tol")?;
    match &cli.command {
        Command::CheckVessel { file } => {
            let v = read_vessel(file)?;
            let r = vessel::check_vessel(&v, tol);
            let body = json!({
                "commutator": num(r.commutator),
                "colligation1": num(r.coll1),
                "colligation2": num(r.coll2),
                "input": num(r.input),
                "output": num(r.output),
                "linkage": num(r.linkage),
                "maxResidual": num(r.max_residual()),
                "negIndex": v.state.neg_index(),
                "pass": r.pass,
                "warnings": r.warnings,
            });
            Ok(Report::verdict(body, r.pass))
        }
        Command::CheckColligation { file } => {
            let c = read_document(file)?.colligation()?;
            let r = colligation::check_colligation(&c, tol);
            let p = colligation::principal_subspace(&c, tol)?;
            let body = json!({
                "residual": num(r.residual),
                "pass": r.pass,
                "negIndex": c.state.neg_index(),
                "principalSubspace": {
                    "dim": p.basis.ncols(),
                    "negIndex": p.neg_index,
                    "nondegenerate": p.nondegenerate,
                    "irreducible": p.irreducible,
                },
            });
            Ok(Report::verdict(body, r.pass))
        }
        Command::CcfEval { file, xi1, xi2, z } => {
            let v = read_vessel(file)?;
            let z = parse_complex(z, "--z")?;
            let (xi1, xi2) = (finite(*xi1, "--xi1")?, finite(*xi2, "--xi2")?);
            let w = charfun::ccf_eval(&v, C64::new(xi1, 0.0), C64::new(xi2, 0.0), z)?;
            Ok(Report::ok(json!({
                "xi": [num(xi1), num(xi2)],
                "z": complex_json(z),
                "W": matrix_json(&w),
            })))
        }
        Command::JcfEval { file, l1, l2, probe } => {
            let v = read_vessel(file)?;
            let pt = CurvePoint::new(parse_complex(l1, "--l1")?, parse_complex(l2, "--l2")?);
            let probe = parse_pair(probe, "--probe")?;
            let j = charfun::jcf_eval(&v, pt, probe, tol)?;
            Ok(Report::ok(json!({
                "point": point_json(&pt),
                "matrix": matrix_json(&j.matrix),
                "inputBasis": matrix_json(&j.input_basis),
                "outputBasis": matrix_json(&j.output_basis),
                "residual": num(j.residual),
            })))
        }
        Command::Restore { file, xi1, xi2, z, to, steps } => {
            let v = read_vessel(file)?;
            let (xi1, xi2) = (finite(*xi1, "--xi1")?, finite(*xi2, "--xi2")?);
            let z0 = parse_complex(z, "--z")?;
            let Some(to) = to else {
                let r = charfun::restoration(&v, xi1, xi2, z0, tol)?;
                let pass = r.defect <= tol;
                let body = json!({
                    "defect": num(r.defect),
                    "points": r.points.iter().map(point_json).collect::<Vec<_>>(),
                    "rcond": num(r.rcond),
                    "W": matrix_json(&r.w_direct),
                    "pass": pass,
                });
                return Ok(Report::verdict(body, pass));
            };
            let z1 = parse_complex(to, "--to")?;
            let n = (*steps).max(2);
            let mut rows = Vec::with_capacity(n);
            let mut worst = 0.0f64;
            for k in 0..n {
                let z = z0 + (z1 - z0) * (k as f64 / (n - 1) as f64);
                let r = charfun::restoration(&v, xi1, xi2, z, tol)?;
                worst = worst.max(r.defect);
                rows.push(json!([num(z.re), num(z.im), num(r.defect), num(r.rcond)]));
            }
            let pass = worst <= tol;
            let body = json!({
                "columns": ["z_re", "z_im", "defect", "rcond"],
                "rows": rows,
                "maxDefect": num(worst),
                "pass": pass,
            });
            Ok(Report::verdict(body, pass))
        }
        Command::NegSquares { file, trials } => {
            let c = read_document(file)?.colligation()?;
            let k = colligation::schur_kernel(&c)?;
            let est = kernels::estimate_neg_squares(&k, *trials, cli.samples, &Region::default(), cli.seed, tol)?;
            let body = json!({
                "estimate": est.estimate,
                "stabilized": est.stabilized,
                "trials": est.trials,
                "points": est.points,
            });
            let rows: Vec<Value> = est.eigenvalues.iter().enumerate().map(|(i, &e)| json!([i, num(e)])).collect();
            Ok(Report {
                table: Some(json!({"columns": ["index", "eigenvalue"], "rows": rows})),
                ..Report::ok(body)
            })
        }
        Command::Realize { file } => {
            let (schur, zeros, j) = read_document(file)?.realize_input()?;
            let out = realization::realize_junitary(&schur, &zeros, &j, tol)?;
            let r = &out.report;
            let pass = r.pass(tol);
            let body = json!({
                "colligation": Document::new(Payload::Colligation(ColligationRecord::from_colligation(&out.colligation))).to_json(),
                "report": {
                    "identityResidual": num(r.identity_residual),
                    "jUnitaryResidual": num(r.junitary_residual),
                    "pgResidual": num(r.pg_residual),
                    "negIndex": r.neg_index,
                    "pass": pass,
                },
            });
            Ok(Report::verdict(body, pass))
        }
        Command::Couple { first, second } => {
            let v1 = read_vessel(first)?;
            let v2 = read_vessel(second)?;
            let v = coupling::couple(&v1, &v2, tol)?;
            Ok(Report::ok(vessel_document(&v)))
        }
        Command::Decompose { file, trailing } => {
            let v = read_vessel(file)?;
            let n = v.state_dim();
            if *trailing == 0 || *trailing >= n {
                return Err(Error::DimensionMismatch(format!(
                    "--trailing must lie strictly between 0 and the state dimension {n}"
                )));
            }
            let d = coupling::decompose(&v, &coupling::trailing_block(n, *trailing), tol)?;
            Ok(Report::ok(json!({
                "v1": vessel_document(&d.v1),
                "v2": vessel_document(&d.v2),
                "transform": matrix_json(&d.transform),
            })))
        }
        Command::Simulate { file, t1, t2, steps } => {
            let v = read_vessel(file)?;
            let (a1, b1) = parse_pair(t1, "--t1")?;
            let (a2, b2) = parse_pair(t2, "--t2")?;
            let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
            let h = kernels::unit_vector(&mut rng, v.state_dim());
            let n = (*steps).max(1);
            let at = |a: f64, b: f64, k: usize| if n == 1 { a } else { a + (b - a) * k as f64 / (n - 1) as f64 };
            let mut columns = vec!["t1".to_string(), "t2".to_string()];
            for k in 0..v.outer_dim() {
                columns.push(format!("v{k}_re"));
                columns.push(format!("v{k}_im"));
            }
            columns.push("pde_residual".into());
            let mut rows = Vec::with_capacity(n * n);
            let mut worst = 0.0f64;
            for i in 0..n {
                for k in 0..n {
                    let (s1, s2) = (at(a1, b1, i), at(a2, b2, k));
                    let out = sys2d::evolve_zero_input(&v, &h, s1, s2).output;
                    let res = sys2d::output_pde_residual(&v, &h, s1, s2);
                    worst = worst.max(res);
                    let mut row = vec![num(s1), num(s2)];
                    for z in out.iter() {
                        row.push(num(z.re));
                        row.push(num(z.im));
                    }
                    row.push(num(res));
                    rows.push(Value::Array(row));
                }
            }
            let pass = worst <= tol;
            let body = json!({"columns": columns, "rows": rows, "maxPdeResidual": num(worst), "pass": pass});
            Ok(Report { default_format: Format::Csv, ..Report::verdict(body, pass) })
        }
        Command::Discriminant { file, side } => {
            let v = read_vessel(file)?;
            let side = match side {
                SideArg::Input => Side::Input,
                SideArg::Output => Side::Output,
            };
            let p = vessel::discriminant_polynomial(&v, side)?;
            let body: Map<String, Value> =
                p.coeffs.iter().map(|(&(i, j), &c)| (format!("({i},{j})"), complex_json(c))).collect();
            Ok(Report::ok(Value::Object(body)))
        }
    }
}
