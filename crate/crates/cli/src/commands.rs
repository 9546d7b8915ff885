use std::collections::BTreeSet;
use std::io;

use anyhow::{anyhow, bail, Context};
use num_complex::Complex64;
use num_traits::Zero;
use serde_json::{json, Value};

use modunits::algebra::{divisors, format_rational, rat, Field};
use modunits::coolcheck::{enumerate, expansion_depth, is_invariant_set, postprocess_report, table_csv};
use modunits::identities::{verify_andrews_gordon, verify_rogers_ramanujan, IdentityCheck};
use modunits::search::{candidate_set, level_bound, level_excluded, level_excluded_sharp, max_level};
use modunits::units::{
    bernoulli_b, cusp_order, distribution_expand, factor_into_units, numeric_check_transform, siegel_expansion,
    unit_expansion,
};
use modunits::{Cusp, EnumerateOptions, PuiseuxSeries, Rational, SiegelIndex, Status, UnitProduct};

use crate::{Command, Config, Format, Outcome};

pub fn run(cmd: &Command, cfg: &Config) -> anyhow::Result<Outcome> {
    match cmd {
        Command::Expand { product, prec } => expand(cfg, product, *prec),
        Command::Siegel { l, p1, p2, prec } => siegel(cfg, *l, *p1, *p2, *prec),
        Command::Ord { product, cusp } => ord(cfg, product, cusp.as_deref()),
        Command::Candidates { n, l } => candidates(cfg, *n, *l),
        Command::Enumerate { n, all } => enumerate_cmd(cfg, *n, *all),
        Command::Check { products } => check(cfg, products),
        Command::Factor { file, l } => factor(cfg, file, *l),
        Command::Verify { name, tol } => verify(cfg, name, *tol),
        Command::Bound { n, l } => bound(cfg, *n, *l),
    }
}

fn parse_product(s: &str) -> anyhow::Result<UnitProduct> {
    s.parse().with_context(|| format!("invalid product {s:?}"))
}

fn print_json(v: &Value) -> anyhow::Result<()> {
    println!("{}", serde_json::to_string_pretty(v)?);
    Ok(())
}

fn csv_writer() -> csv::Writer<io::Stdout> {
    csv::Writer::from_writer(io::stdout())
}

/// Nonzero coefficients as `exponent,coefficient` rows.
fn series_csv<F: Field>(f: &PuiseuxSeries<F>) -> anyhow::Result<()> {
    let mut w = csv_writer();
    w.write_record(["exponent", "coefficient"])?;
    let lead = Rational::new(f.lead().into(), f.denom().into());
    for (i, c) in f.coeffs().iter().enumerate() {
        if !c.eq_zero() {
            let e = &lead + Rational::new((i as i64).into(), f.denom().into());
            w.write_record([format_rational(&e), c.render()])?;
        }
    }
    w.flush()?;
    Ok(())
}

fn expand(cfg: &Config, product: &str, prec: u32) -> anyhow::Result<Outcome> {
    let p = parse_product(product)?;
    let lead = p.leading_exponent();
    let f = cfg.cache.unit(&p, &(&lead + rat(prec as i64, 1)));
    match cfg.format {
        Format::Text => println!("{f}"),
        Format::Json => print_json(&json!({
            "product": p,
            "leading_exponent": format_rational(&lead),
            "series": f.to_json(),
        }))?,
        Format::Csv => series_csv(&f)?,
    }
    Ok(Outcome::Pass)
}

fn siegel(cfg: &Config, l: u64, p1: i64, p2: i64, prec: u32) -> anyhow::Result<Outcome> {
    let alpha = SiegelIndex::new(l, p1, p2)?;
    let lead = bernoulli_b(&alpha.alpha().0) / rat(2, 1);
    let f = siegel_expansion(&alpha, &(&lead + rat(prec as i64, 1)))?;
    match cfg.format {
        Format::Text => println!("{f}"),
        Format::Json => print_json(&json!({
            "l": l,
            "p": [alpha.p1(), alpha.p2()],
            "leading_exponent": format_rational(&lead),
            "series": f.to_json(),
        }))?,
        Format::Csv => series_csv(&f)?,
    }
    Ok(Outcome::Pass)
}

fn ord(cfg: &Config, product: &str, cusp: Option<&str>) -> anyhow::Result<Outcome> {
    let p = parse_product(product)?;
    let cusps: Vec<Cusp> = match cusp {
        Some(c) => vec![c.parse().with_context(|| format!("invalid cusp {c:?}"))?],
        None => {
            let l = p.level();
            let mut v = vec![Cusp::Infinity, Cusp::Finite(rat(0, 1))];
            v.extend(
                divisors(l)
                    .into_iter()
                    .filter(|&c| c > 1 && c < l)
                    .map(|c| Cusp::Finite(rat(1, c as i64))),
            );
            v
        }
    };
    let rows: Vec<(String, String)> = cusps
        .iter()
        .map(|c| (c.to_string(), format_rational(&cusp_order(&p, c))))
        .collect();
    match cfg.format {
        Format::Text => {
            for (c, o) in &rows {
                println!("{c}\t{o}");
            }
        }
        Format::Json => print_json(&json!({
            "product": p,
            "orders": rows.iter().map(|(c, o)| json!({"cusp": c, "order": o})).collect::<Vec<_>>(),
        }))?,
        Format::Csv => {
            let mut w = csv_writer();
            w.write_record(["cusp", "order"])?;
            for (c, o) in &rows {
                w.write_record([c, o])?;
            }
            w.flush()?;
        }
    }
    Ok(Outcome::Pass)
}

fn candidates(cfg: &Config, n: usize, l: u64) -> anyhow::Result<Outcome> {
    let c = candidate_set(n, l)?;
    match cfg.format {
        Format::Text => {
            if c.is_empty() {
                println!("no candidates");
            }
            for p in &c.points {
                println!("{p}");
            }
        }
        Format::Json => print_json(&c.to_json())?,
        Format::Csv => {
            let mut w = csv_writer();
            w.write_record(["point"])?;
            for p in &c.points {
                w.write_record([p.to_string()])?;
            }
            w.flush()?;
        }
    }
    Ok(Outcome::Pass)
}

fn set_text(s: &BTreeSet<UnitProduct>) -> String {
    let parts: Vec<String> = s.iter().map(|p| p.to_string()).collect();
    format!("{{{}}}", parts.join(","))
}

fn enumerate_cmd(cfg: &Config, n: usize, all: bool) -> anyhow::Result<Outcome> {
    let opts = EnumerateOptions {
        l_max: cfg.l_max,
        depth: cfg.depth_override,
        include_all: all,
    };
    let reports = enumerate(n, &opts, Some(&cfg.cache))?;
    match cfg.format {
        Format::Json => print_json(&Value::Array(reports.iter().map(|r| r.to_json()).collect()))?,
        Format::Csv => print!("{}", table_csv(&postprocess_report(&reports)?)),
        Format::Text => {
            for r in &reports {
                let status = match r.status {
                    Status::Empty => "empty",
                    Status::FixedPoint => "fixed point",
                };
                println!(
                    "n={} l={}: {status}, sizes {:?}, {}",
                    r.n,
                    r.l,
                    r.iterations,
                    set_text(&r.set)
                );
            }
            for row in postprocess_report(&reports)? {
                if row.is_listed() {
                    println!("l={}: {} = {}", row.l, row.label, set_text(&row.set));
                }
            }
        }
    }
    Ok(Outcome::Pass)
}

fn check(cfg: &Config, products: &[String]) -> anyhow::Result<Outcome> {
    let set: BTreeSet<UnitProduct> = products.iter().map(|s| parse_product(s)).collect::<anyhow::Result<_>>()?;
    let first = set.iter().next().ok_or_else(|| anyhow!("no products given"))?;
    let l = first.level();
    if let Some(other) = set.iter().find(|p| p.level() != l) {
        bail!("{other} is not of level {l}");
    }
    let n = set.iter().map(|p| p.len()).max().unwrap_or(0).max(1);
    let depth = cfg.depth_override.unwrap_or_else(|| expansion_depth(l, n));
    let res = is_invariant_set(&set, depth, Some(&cfg.cache))?;
    let failures: Vec<String> = res.failures.iter().map(|p| p.to_string()).collect();
    match cfg.format {
        Format::Json => print_json(&json!({
            "set": set,
            "depth": depth,
            "invariant": res.invariant,
            "failures": failures,
        }))?,
        Format::Csv => {
            let mut w = csv_writer();
            w.write_record(["product", "image_in_span"])?;
            for p in &set {
                w.write_record([p.to_string(), (!res.failures.contains(p)).to_string()])?;
            }
            w.flush()?;
        }
        Format::Text => {
            if res.invariant {
                println!("invariant (depth {depth})");
            } else {
                println!("not invariant (depth {depth}): images of {} leave the span", failures.join(", "));
            }
        }
    }
    Ok(if res.invariant { Outcome::Pass } else { Outcome::Fail })
}

fn factor(cfg: &Config, file: &std::path::Path, l: u64) -> anyhow::Result<Outcome> {
    let text = std::fs::read_to_string(file).with_context(|| format!("reading {}", file.display()))?;
    let v: Value = serde_json::from_str(&text).context("input is not JSON")?;
    // accept either a bare series or the output of `expand --format json`
    let series = v.get("series").unwrap_or(&v);
    let f = PuiseuxSeries::<Rational>::from_json(&(), series)?;
    let result = factor_into_units(&f, l)?;
    let ok = result.is_ok();
    match cfg.format {
        Format::Json => {
            let v = match &result {
                Ok(u) => json!({"ok": true, "factorization": u}),
                Err(o) => json!({"ok": false, "obstruction": o}),
            };
            print_json(&v)?
        }
        Format::Csv => {
            let mut w = csv_writer();
            match &result {
                Ok(u) => {
                    w.write_record(["residue", "exponent"])?;
                    for (r, e) in &u.exponents {
                        w.write_record([r.to_string(), e.to_string()])?;
                    }
                }
                Err(o) => {
                    w.write_record(["obstruction"])?;
                    w.write_record([o.to_string()])?;
                }
            }
            w.flush()?;
        }
        Format::Text => match &result {
            Ok(u) => {
                let mut parts: Vec<String> = Vec::new();
                if !u.shift.is_zero() {
                    parts.push(format!("q^({})", format_rational(&u.shift)));
                }
                for (r, e) in &u.exponents {
                    parts.push(if *e == 1 { format!("[{r}]_{l}") } else { format!("[{r}]_{l}^{e}") });
                }
                println!("{}", if parts.is_empty() { "1".into() } else { parts.join("·") });
            }
            Err(o) => println!("not a product of units of level {l}: {o}"),
        },
    }
    Ok(if ok { Outcome::Pass } else { Outcome::Fail })
}

fn parse_ints(s: &str, count: usize) -> anyhow::Result<Vec<i64>> {
    let v: Vec<i64> = s
        .split(',')
        .map(|t| t.trim().parse::<i64>())
        .collect::<Result<_, _>>()
        .with_context(|| format!("expected {count} comma-separated integers, got {s:?}"))?;
    if v.len() != count {
        bail!("expected {count} comma-separated integers, got {s:?}");
    }
    Ok(v)
}

fn distribution_check(r: i64, l: u64, m: u64, depth: usize) -> anyhow::Result<IdentityCheck> {
    let lhs_p = UnitProduct::new(l, &[r])?;
    let rhs_p = distribution_expand(r, l, m)?;
    let bound = rat(depth as i64, 1);
    let diff = unit_expansion(&lhs_p, &bound).sub(&unit_expansion(&rhs_p, &bound));
    let first_mismatch = diff.leading_exponent().map(|e| format_rational(&e));
    Ok(IdentityCheck {
        name: format!("distribution:{lhs_p}={rhs_p}"),
        passed: first_mismatch.is_none(),
        depth,
        first_mismatch,
    })
}

fn siegel_numeric(l_max: u64, terms: usize, tol: f64) -> anyhow::Result<Vec<IdentityCheck>> {
    let zs = [Complex64::new(0.0, 2.0), Complex64::new(0.5, 1.5)];
    let mut out = Vec::new();
    for l in 2..=l_max {
        for p1 in 0..l as i64 {
            for p2 in 0..l as i64 {
                let Ok(alpha) = SiegelIndex::new(l, p1, p2) else { continue };
                let passed = zs.iter().all(|&z| numeric_check_transform(&alpha, z, terms, tol));
                out.push(IdentityCheck {
                    name: format!("siegel-numeric:({p1},{p2})/{l}"),
                    passed,
                    depth: terms,
                    first_mismatch: None,
                });
            }
        }
    }
    Ok(out)
}

fn verify(cfg: &Config, name: &str, tol: f64) -> anyhow::Result<Outcome> {
    let (head, arg) = name.split_once(':').unwrap_or((name, ""));
    let checks = match head {
        "rr" => verify_rogers_ramanujan(cfg.depth_override.unwrap_or(300)),
        "ag" => {
            let l: u64 = arg.parse().with_context(|| format!("expected ag:<l>, got {name:?}"))?;
            verify_andrews_gordon(l, cfg.depth_override.unwrap_or(100))?
        }
        "distribution" => {
            let v = parse_ints(arg, 3)?;
            let (l, m) = (u64::try_from(v[1])?, u64::try_from(v[2])?);
            vec![distribution_check(v[0], l, m, cfg.depth_override.unwrap_or(100))?]
        }
        "siegel-numeric" => siegel_numeric(cfg.l_max.unwrap_or(10), cfg.depth_override.unwrap_or(400), tol)?,
        _ => bail!("unknown verification {name:?}; expected rr, ag:<l>, distribution:<r>,<l>,<m> or siegel-numeric"),
    };
    let ok = checks.iter().all(|c| c.passed);
    match cfg.format {
        Format::Json => print_json(&serde_json::to_value(&checks)?)?,
        Format::Csv => {
            let mut w = csv_writer();
            w.write_record(["name", "passed", "depth", "first_mismatch"])?;
            for c in &checks {
                w.write_record([
                    c.name.clone(),
                    c.passed.to_string(),
                    c.depth.to_string(),
                    c.first_mismatch.clone().unwrap_or_default(),
                ])?;
            }
            w.flush()?;
        }
        Format::Text => {
            for c in &checks {
                let tail = c
                    .first_mismatch
                    .as_ref()
                    .map(|e| format!(", first mismatch at q^({e})"))
                    .unwrap_or_default();
                println!("{} {} (depth {}){tail}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.depth);
            }
        }
    }
    Ok(if ok { Outcome::Pass } else { Outcome::Fail })
}

fn decimal(x: &Rational) -> String {
    let scaled = (x * rat(1_000_000, 1)).floor().to_integer();
    let s = format!("{:07}", scaled);
    let (int, frac) = s.split_at(s.len() - 6);
    format!("{int}.{frac}")
}

fn bound(cfg: &Config, n: u32, l: Option<u64>) -> anyhow::Result<Outcome> {
    if n == 0 {
        bail!("n must be positive");
    }
    let top = max_level(n);
    let at = l.map(|l| {
        let (lo, hi) = level_bound(n, l, 2);
        (l, lo, hi, level_excluded(n, l), level_excluded_sharp(n, l))
    });
    match cfg.format {
        Format::Json => {
            let mut v = json!({"n": n, "max_level": top});
            if let Some((l, lo, hi, ex, sharp)) = &at {
                v["l"] = json!(l);
                v["lower"] = json!(format_rational(lo));
                v["upper"] = json!(format_rational(hi));
                v["excluded"] = json!(ex);
                v["excluded_sharp"] = json!(sharp);
            }
            print_json(&v)?
        }
        Format::Csv => {
            let mut w = csv_writer();
            w.write_record(["n", "max_level", "l", "lower", "upper", "excluded", "excluded_sharp"])?;
            let mut rec = vec![n.to_string(), top.to_string()];
            match &at {
                Some((l, lo, hi, ex, sharp)) => rec.extend([
                    l.to_string(),
                    decimal(lo),
                    decimal(hi),
                    ex.to_string(),
                    sharp.to_string(),
                ]),
                None => rec.extend(std::iter::repeat_n(String::new(), 5)),
            }
            w.write_record(rec)?;
            w.flush()?;
        }
        Format::Text => {
            println!("n={n}: levels above {top} are excluded");
            if let Some((l, lo, hi, ex, sharp)) = &at {
                println!("l={l}: bound in [{}, {}]", decimal(lo), decimal(hi));
                println!("excluded: {ex} (p=2), {sharp} (smallest prime factor)");
            }
        }
    }
    Ok(Outcome::Pass)
}
