//! Parameter sweeps over a family, one CSV row per point.

use std::fmt::Write as _;

use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;
use sr2gates::classify;
use sr2gates::families::{build_unvalidated, k0_solve, FamilyId, FamilySpec, K0SystemPoint};

use crate::Failure;

/// Points above this unitarity residual count as a breach when flagged.
const BREACH_RESIDUAL: f64 = 1e-8;
/// Largest number of grid points accepted in one sweep.
const MAX_POINTS: usize = 1_000_000;

#[derive(Clone, Debug)]
pub struct Axis {
    pub name: String,
    pub lo: f64,
    pub hi: f64,
    pub steps: usize,
}

impl Axis {
    fn values(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.lo];
        }
        let h = (self.hi - self.lo) / (self.steps - 1) as f64;
        (0..self.steps).map(|i| self.lo + h * i as f64).collect()
    }
}

pub fn parse_grid(s: &str) -> Result<Axis, String> {
    let (name, range) = s
        .split_once('=')
        .ok_or_else(|| format!("expected name=lo:hi:steps, got '{s}'"))?;
    let parts: Vec<&str> = range.split(':').collect();
    let [lo, hi, steps] = parts.as_slice() else {
        return Err(format!("expected lo:hi:steps, got '{range}'"));
    };
    let num = |t: &str| {
        t.trim()
            .parse::<f64>()
            .map_err(|_| format!("bad bound '{t}'"))
    };
    let steps: usize = steps
        .trim()
        .parse()
        .ok()
        .filter(|&k| k >= 1)
        .ok_or_else(|| format!("bad step count '{steps}'"))?;
    Ok(Axis {
        name: name.trim().to_string(),
        lo: num(lo)?,
        hi: num(hi)?,
        steps,
    })
}

#[derive(Clone, Debug)]
pub struct Row {
    pub params: Vec<Complex64>,
    pub residual: f64,
    pub sn: Option<usize>,
    pub genuine: Option<bool>,
    pub flag: String,
}

impl Row {
    pub fn is_flagged(&self) -> bool {
        self.flag != "ok"
    }
}

#[derive(Clone, Debug)]
pub struct Table {
    pub family: FamilyId,
    pub names: Vec<String>,
    pub rows: Vec<Row>,
    /// `(converged, attempted)` solver seeds, for solver-driven sweeps.
    pub seeds: Option<(usize, usize)>,
}

fn sci(x: f64) -> String {
    format!("{x:.16e}")
}

impl Table {
    pub fn to_csv(&self) -> String {
        let complex = self.family.has_complex_params();
        let mut header: Vec<String> = Vec::new();
        for name in &self.names {
            if complex {
                header.push(format!("{name}_re"));
                header.push(format!("{name}_im"));
            } else {
                header.push(name.clone());
            }
        }
        header.extend(["unitarity_residual", "sn", "genuine", "flag"].map(String::from));
        let mut out = header.join(",");
        out.push('\n');
        for row in &self.rows {
            let mut cells: Vec<String> = Vec::new();
            for z in &row.params {
                cells.push(sci(z.re));
                if complex {
                    cells.push(sci(z.im));
                }
            }
            cells.push(sci(row.residual));
            cells.push(row.sn.map_or("n/a".into(), |k| k.to_string()));
            cells.push(row.genuine.map_or("n/a".into(), |g| g.to_string()));
            cells.push(row.flag.clone());
            let _ = writeln!(out, "{}", cells.join(","));
        }
        out
    }

    pub fn flagged(&self) -> usize {
        self.rows.iter().filter(|r| r.is_flagged()).count()
    }

    pub fn summary(&self) -> String {
        let mut s = format!(
            "{}: {} rows, {} flagged",
            self.family,
            self.rows.len(),
            self.flagged()
        );
        if let Some((ok, total)) = self.seeds {
            let _ = write!(s, ", {ok}/{total} solver seeds converged");
        }
        s
    }

    /// First flagged row whose unitarity residual exceeds the breach level.
    pub fn breach(&self) -> Option<String> {
        self.rows
            .iter()
            .find(|r| r.is_flagged() && (r.residual.is_nan() || r.residual > BREACH_RESIDUAL))
            .map(|r| format!("{} (residual {:.3e})", r.flag, r.residual))
    }
}

/// Evaluates one point: unitarity, genuineness and singular number against
/// the family's declared value.
pub fn evaluate(spec: &FamilySpec, names: &[String], tol: f64) -> Row {
    let params: Vec<Complex64> = names
        .iter()
        .map(|n| spec.params.get(n).copied().unwrap_or_default())
        .collect();
    let mut flags: Vec<String> = Vec::new();
    if spec.validate().is_err() {
        flags.push("out-of-domain".into());
    }
    let built = build_unvalidated(spec).and_then(|g| Ok((g.operator.with_tol(tol)?, g.declared_k)));
    let (op, declared) = match built {
        Ok(x) => x,
        Err(e) => {
            flags.push(format!("error:{}", e.to_string().replace(',', ";")));
            return Row {
                params,
                residual: f64::NAN,
                sn: None,
                genuine: None,
                flag: flags.join("+"),
            };
        }
    };
    let residual = op.unitarity_residual();
    if residual > 1e-10 * (op.total_dim() as f64).sqrt() {
        flags.push("non-unitary".into());
    }
    let (sn, genuine) = match classify(&op) {
        Ok(label) => (label.singular_number, Some(label.genuine)),
        Err(_) => (None, None),
    };
    if genuine != Some(true) {
        flags.push("non-genuine".into());
    }
    if sn != Some(declared) {
        flags.push("sn-mismatch".into());
    }
    Row {
        params,
        residual,
        sn,
        genuine,
        flag: if flags.is_empty() {
            "ok".into()
        } else {
            flags.join("+")
        },
    }
}

fn grid_points(
    base: &FamilySpec,
    axes: &[Axis],
    names: &[String],
) -> Result<Vec<FamilySpec>, Failure> {
    for axis in axes {
        if !names.contains(&axis.name) {
            return Err(Failure {
                code: 2,
                msg: format!("{} has no parameter '{}'", base.family, axis.name),
            });
        }
    }
    let missing: Vec<&String> = names
        .iter()
        .filter(|n| !base.params.contains_key(*n) && !axes.iter().any(|a| &a.name == *n))
        .collect();
    if !missing.is_empty() {
        return Err(Failure {
            code: 2,
            msg: format!(
                "no value or grid for {}",
                missing
                    .iter()
                    .map(|s| s.as_str())
                    .collect::<Vec<_>>()
                    .join(", ")
            ),
        });
    }
    let total = axes
        .iter()
        .try_fold(1usize, |acc, a| acc.checked_mul(a.steps))
        .filter(|&t| t <= MAX_POINTS)
        .ok_or_else(|| Failure {
            code: 2,
            msg: format!("grid exceeds {MAX_POINTS} points"),
        })?;
    let values: Vec<Vec<f64>> = axes.iter().map(Axis::values).collect();
    let mut specs = Vec::with_capacity(total);
    for mut idx in 0..total {
        let mut spec = base.clone();
        for (axis, vals) in axes.iter().zip(&values).rev() {
            spec = spec.with(&axis.name, vals[idx % vals.len()]);
            idx /= vals.len();
        }
        specs.push(spec);
    }
    Ok(specs)
}

fn k0_center(base: &FamilySpec) -> K0SystemPoint {
    let get = |k: &str| base.params.get(k).copied();
    match (get("a"), get("b"), get("c"), get("d")) {
        (Some(a), Some(b), Some(c), Some(d)) => K0SystemPoint { a, b, c, d },
        _ => K0SystemPoint {
            a: Complex64::new(0.5, -0.5),
            b: Complex64::new(0.5, 0.5),
            c: Complex64::new(0.0, -1.0),
            d: Complex64::new(0.0, -1.0),
        },
    }
}

pub fn run(
    base: &FamilySpec,
    axes: &[Axis],
    seeds: usize,
    rng_seed: u64,
    tol: f64,
) -> Result<Table, Failure> {
    let family = base.family;
    let names = family.param_names(base.n);
    if family != FamilyId::T3_K0 {
        let specs = grid_points(base, axes, &names)?;
        let rows = specs.par_iter().map(|s| evaluate(s, &names, tol)).collect();
        return Ok(Table {
            family,
            names,
            rows,
            seeds: None,
        });
    }
    if !axes.is_empty() {
        return Err(Failure {
            code: 2,
            msg: "t3-k0 sweeps perturbed solver seeds; use --seeds instead of --grid".into(),
        });
    }
    let center = k0_center(base);
    if seeds == 0 {
        // evaluate the supplied point itself
        let spec = base
            .clone()
            .with_complex("a", center.a)
            .with_complex("b", center.b)
            .with_complex("c", center.c)
            .with_complex("d", center.d);
        return Ok(Table {
            family,
            rows: vec![evaluate(&spec, &names, tol)],
            names,
            seeds: None,
        });
    }
    let mut rng = StdRng::seed_from_u64(rng_seed);
    let mut jitter = |z: Complex64| {
        z + Complex64::new(rng.random_range(-0.05..0.05), rng.random_range(-0.05..0.05))
    };
    let starts: Vec<K0SystemPoint> = (0..seeds)
        .map(|_| K0SystemPoint {
            a: jitter(center.a),
            b: jitter(center.b),
            c: jitter(center.c),
            d: jitter(center.d),
        })
        .collect();
    let rows: Vec<Row> = starts
        .par_iter()
        .filter_map(|s| k0_solve(s, 200).ok())
        .map(|p| {
            let spec = base
                .clone()
                .with_complex("a", p.a)
                .with_complex("b", p.b)
                .with_complex("c", p.c)
                .with_complex("d", p.d);
            evaluate(&spec, &names, tol)
        })
        .collect();
    let converged = rows.len();
    Ok(Table {
        family,
        names,
        rows,
        seeds: Some((converged, seeds)),
    })
}
