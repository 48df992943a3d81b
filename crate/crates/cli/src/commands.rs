use std::fs;
use std::io::{self, Write};

use anyhow::{anyhow, bail, Context, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use stabkit::chamber::upper_envelope;
use stabkit::chern::EnumerationBounds;
use stabkit::lepotier::{grid_points, CharacterSource, WitnessBounds};
use stabkit::quadforms::DEFAULT_FACE_BUDGET;
use stabkit::{
    Blocking, Character, Extended, Params, Quotient, Rational, Scalar, Slope, Surface, SweepRow,
    WallSegment,
};

use crate::report::{ext, rat, rats, Report};
use crate::svg::{self, Series};
use crate::{
    ChamberCmd, ChargeCmd, ChernCmd, Cli, Command, Grid, LpCmd, Point, Polarization, QuotientCmd,
    SourceArgs, SupportCmd, SurfaceCmd, Verdict,
};

pub fn run(cli: &Cli) -> Result<Verdict> {
    match &cli.command {
        Command::Surface(SurfaceCmd::Show) => surface_show(cli),
        Command::Surface(SurfaceCmd::Gallery) => gallery(cli),
        Command::Lp(LpCmd::Eval { pol, x }) => lp_eval(cli, pol, &x.0),
        Command::Lp(LpCmd::Scan { pol, grid }) => lp_scan(cli, pol, grid),
        Command::Charge(ChargeCmd::Eval { point, ch }) => charge_eval(cli, point, ch.as_ref()),
        Command::Support(SupportCmd::Check {
            point,
            delta,
            epsilon,
            emit_form,
        }) => support_check(cli, point, delta.as_ref(), epsilon.as_ref(), *emit_form),
        Command::Chamber(ChamberCmd::Check { point }) => chamber_check(cli, point),
        Command::Chamber(ChamberCmd::Sweep { pol, grid, source }) => {
            chamber_sweep(cli, pol, grid, source)
        }
        Command::Quotient(QuotientCmd::Verify { file, samples }) => {
            quotient_verify(cli, file.as_deref(), *samples)
        }
        Command::Quotient(QuotientCmd::Induce { point }) => quotient_induce(cli, point),
        Command::Chern(ChernCmd::Enumerate {
            r_max,
            c1_box,
            ch2_range,
        }) => chern_enumerate(cli, *r_max, &c1_box.0, ch2_range),
        Command::Chern(ChernCmd::Info { pol, ch }) => chern_info(cli, pol, ch),
    }
}

fn load_surface(cli: &Cli) -> Result<Surface> {
    let path = cli
        .surface
        .as_ref()
        .ok_or_else(|| anyhow!("--surface is required"))?;
    Ok(stabkit::load_surface(path)?)
}

fn load_quotient(cli: &Cli, file: Option<&std::path::Path>) -> Result<Quotient> {
    let path = file
        .or(cli.quotient.as_deref())
        .ok_or_else(|| anyhow!("a quotient file is required (positional or --quotient)"))?;
    Ok(stabkit::load_quotient(path)?)
}

/// `H`, `B` and, when present, `(α, β)` from `--params`.
type Unpacked = (Vec<Rational>, Vec<Rational>, Option<(Rational, Rational)>);

fn unpack_params(raw: &str, rho: usize) -> Result<Unpacked> {
    let groups: Vec<&str> = raw.split(';').collect();
    let parse = |t: &str| crate::args::vector(t).map_err(|e| anyhow!("--params: {e}"));
    if groups.len() == 4 {
        let h = parse(groups[0])?;
        let b = parse(groups[1])?;
        let a = parse(groups[2])?;
        let be = parse(groups[3])?;
        if a.len() != 1 || be.len() != 1 {
            bail!("--params: alpha and beta must be single rationals");
        }
        return Ok((h, b, Some((a[0].clone(), be[0].clone()))));
    }
    let flat = parse(raw)?;
    if flat.len() == 2 * rho + 2 {
        let ab = Some((flat[2 * rho].clone(), flat[2 * rho + 1].clone()));
        Ok((flat[..rho].to_vec(), flat[rho..2 * rho].to_vec(), ab))
    } else if flat.len() == 2 * rho {
        Ok((flat[..rho].to_vec(), flat[rho..].to_vec(), None))
    } else {
        bail!(
            "--params needs 2ρ+2 = {} rationals, got {}",
            2 * rho + 2,
            flat.len()
        )
    }
}

fn unpack(rho: usize, pol: &Polarization) -> Result<Unpacked> {
    let (h, b, ab) = match &pol.params {
        Some(raw) => unpack_params(raw, rho)?,
        None => {
            let h = pol
                .h
                .clone()
                .ok_or_else(|| anyhow!("--H or --params is required"))?
                .0;
            let b = pol
                .b
                .clone()
                .map(|l| l.0)
                .unwrap_or_else(|| vec![Rational::from_integer(0.into()); rho]);
            (h, b, None)
        }
    };
    if h.len() != rho {
        bail!("H needs {rho} entries, got {}", h.len());
    }
    if b.len() != rho {
        bail!("B needs {rho} entries, got {}", b.len());
    }
    Ok((h, b, ab))
}

fn resolve(s: &Surface, pol: &Polarization) -> Result<(Vec<Rational>, Vec<Rational>)> {
    let (h, b, _) = unpack(s.rank(), pol)?;
    Ok((h, b))
}

fn point_params(rho: usize, point: &Point) -> Result<Params> {
    let (h, b, ab) = unpack(rho, &point.pol)?;
    let (alpha, beta) = match (&point.alpha, &point.beta, ab) {
        (Some(a), Some(be), _) => (a.clone(), be.clone()),
        (None, None, Some(ab)) => ab,
        _ => bail!("give --alpha and --beta, or all four values in --params"),
    };
    Ok(Params::new(h, b, alpha, beta))
}

fn params(s: &Surface, point: &Point) -> Result<Params> {
    point_params(s.rank(), point)
}

fn grid(g: &Grid) -> Result<(Rational, Rational, Rational)> {
    if let Some(r) = &g.range {
        return Ok(r.clone());
    }
    match (&g.from, &g.to, &g.step) {
        (Some(a), Some(b), Some(c)) => Ok((a.clone(), b.clone(), c.clone())),
        _ => bail!("give --range lo:hi:step or all of --from, --to, --step"),
    }
}

fn face_budget(cli: &Cli) -> usize {
    cli.budget.map_or(DEFAULT_FACE_BUDGET, |b| b as usize)
}

fn phi_value(r: &stabkit::Result<Extended<Rational>>) -> Value {
    match r {
        Ok(v) => ext(v),
        Err(_) => Value::String("unknown".into()),
    }
}

/// Runs `f` over contiguous chunks of `items` on up to `jobs` threads and
/// concatenates the results in input order.
fn parallel_chunks<I, O, F>(items: &[I], jobs: usize, f: F) -> Result<Vec<O>>
where
    I: Sync,
    O: Send,
    F: Fn(&[I]) -> Result<Vec<O>> + Sync,
{
    if items.is_empty() {
        return Ok(Vec::new());
    }
    let chunk = items.len().div_ceil(jobs.max(1));
    let f = &f;
    std::thread::scope(|scope| {
        let handles: Vec<_> = items
            .chunks(chunk)
            .map(|c| scope.spawn(move || f(c)))
            .collect();
        let mut out = Vec::with_capacity(items.len());
        for h in handles {
            out.extend(h.join().map_err(|_| anyhow!("worker panicked"))??);
        }
        Ok(out)
    })
}

fn write_csv(
    cli: &Cli,
    header: &[String],
    rows: &[Vec<String>],
    stdout_fallback: bool,
) -> Result<()> {
    let mut buf = Vec::new();
    {
        let mut w = csv::Writer::from_writer(&mut buf);
        w.write_record(header)?;
        for r in rows {
            w.write_record(r)?;
        }
        w.flush()?;
    }
    match &cli.csv {
        Some(path) => {
            fs::write(path, &buf).with_context(|| format!("writing {}", path.display()))?
        }
        None if stdout_fallback && !cli.json => io::stdout().write_all(&buf)?,
        None => {}
    }
    Ok(())
}

fn write_svg(cli: &Cli, contents: impl FnOnce() -> String) -> Result<()> {
    if let Some(path) = &cli.svg {
        fs::write(path, contents()).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

fn f(x: &Rational) -> f64 {
    x.to_f64_lossy()
}

fn ext_f(x: &Extended<Rational>) -> f64 {
    x.finite().map_or(f64::NEG_INFINITY, f)
}

fn surface_show(cli: &Cli) -> Result<Verdict> {
    let s = load_surface(cli)?;
    let mut r = Report::new();
    r.put("name", s.name())
        .put("rank", s.rank())
        .put("class", s.class().as_str())
        .put(
            "gram",
            Value::Array(s.gram().to_rows().iter().map(|row| rats(row)).collect()),
        )
        .put(
            "nef_inequalities",
            Value::Array(s.nef_inequalities().iter().map(|v| rats(v)).collect()),
        )
        .put(
            "effective_generators",
            Value::Array(s.effective_generators().iter().map(|v| rats(v)).collect()),
        )
        .put("chtwo_denominator", s.chtwo_denominator())
        .put("lp_provider", s.lp_provider().kind())
        .put("certified", s.lp_provider().is_certified());
    r.emit(cli.json);
    Ok(Verdict::Pass)
}

fn gallery(cli: &Cli) -> Result<Verdict> {
    let names: Vec<&str> = stabkit::config::BUNDLED.iter().map(|(n, _)| *n).collect();
    let mut r = Report::new();
    r.put("bundled", names);
    r.emit(cli.json);
    Ok(Verdict::Pass)
}

fn lp_eval(cli: &Cli, pol: &Polarization, xs: &[Rational]) -> Result<Verdict> {
    let s = load_surface(cli)?;
    let (h, b) = resolve(&s, pol)?;
    let mut phis = Vec::new();
    let mut ubs = Vec::new();
    for x in xs {
        phis.push(ext(&s.phi(&h, &b, x)?));
        ubs.push(rat(&s.upper_bound(&h, &b, x)?));
    }
    let mut r = Report::new();
    r.put("provider", s.lp_provider().kind())
        .put("x", rats(xs))
        .put("phi", phis)
        .put("upper_bound", ubs);
    r.emit(cli.json);
    Ok(Verdict::Pass)
}

fn lp_scan(cli: &Cli, pol: &Polarization, g: &Grid) -> Result<Verdict> {
    let s = load_surface(cli)?;
    let (h, b) = resolve(&s, pol)?;
    let (from, to, step) = grid(g)?;
    let xs = grid_points(&from, &to, &step)?;
    let rows = parallel_chunks(&xs, cli.jobs, |chunk| {
        chunk
            .iter()
            .map(|x| Ok((x.clone(), s.phi(&h, &b, x)?, s.upper_bound(&h, &b, x)?)))
            .collect()
    })?;
    let flags = s.continuity_report(&h, &b, (&from, &to), &step)?;
    let jumps: std::collections::BTreeSet<&Rational> = flags
        .iter()
        .filter(|fl| fl.is_jump)
        .map(|fl| &fl.x)
        .collect();
    let table: Vec<Vec<String>> = rows
        .iter()
        .map(|(x, p, u)| {
            vec![
                x.to_string(),
                p.to_string(),
                u.to_string(),
                jumps.contains(x).to_string(),
            ]
        })
        .collect();
    let header = ["x", "phi", "upper_bound", "jump_flag"].map(String::from);
    write_csv(cli, &header, &table, false)?;
    write_svg(cli, || {
        svg::plot(
            &format!("Le Potier function on {}", s.name()),
            "x",
            "value",
            &[
                Series {
                    label: "upper bound".into(),
                    color: "gray",
                    points: rows.iter().map(|(x, _, u)| (f(x), f(u))).collect(),
                    markers: false,
                },
                Series {
                    label: "phi".into(),
                    color: "blue",
                    points: rows.iter().map(|(x, p, _)| (f(x), ext_f(p))).collect(),
                    markers: false,
                },
            ],
        )
    })?;
    let flag_values: Vec<Value> = flags
        .iter()
        .map(|fl| {
            json!({
                "x": rat(&fl.x),
                "jump_size": fl.jump_size.as_ref().map_or(Value::Null, rat),
                "is_jump": fl.is_jump,
                "is_linear_segment": fl.is_linear_segment,
            })
        })
        .collect();
    let mut r = Report::new();
    r.put("points", rows.len())
        .put(
            "at_upper_bound",
            rows.iter()
                .filter(|(_, p, u)| *p == Extended::Finite(u.clone()))
                .count(),
        )
        .put("flags", flag_values);
    r.emit(cli.json);
    Ok(if flags.is_empty() {
        Verdict::Pass
    } else {
        Verdict::Negative
    })
}

fn charge_eval(cli: &Cli, point: &Point, ch: Option<&Character>) -> Result<Verdict> {
    let s = load_surface(cli)?;
    let p = params(&s, point)?;
    let z = s.charge_functional(&p)?;
    let k = z.kernel();
    let mut r = Report::new();
    if let Some(v) = ch {
        let (re, im) = s.central_charge(&p, v)?;
        r.put("re", rat(&re)).put("im", rat(&im));
    }
    r.put("re_functional", rats(&z.re))
        .put("im_functional", rats(&z.im))
        .put(
            "kernel",
            Value::Array(k.basis.iter().map(|v| rats(v)).collect()),
        )
        .put("degenerate", k.degenerate);
    match s.normalized_to_tilt(&p) {
        Ok(t) => r
            .put("a_squared", rat(&t.a_squared))
            .put("b_tilt", rats(&t.b_tilt)),
        Err(_) => r.put("a_squared", Value::Null),
    };
    r.emit(cli.json);
    Ok(Verdict::Pass)
}

fn support_check(
    cli: &Cli,
    point: &Point,
    delta: Option<&Rational>,
    epsilon: Option<&Rational>,
    emit_form: bool,
) -> Result<Verdict> {
    let s = load_surface(cli)?;
    let p = params(&s, point)?;
    let cone = s.compute_c_h_with_budget(&p.h, face_budget(cli))?;
    let delta = match delta {
        Some(d) => d.clone(),
        None => s.choose_delta(&p.h, &p.b, &p.alpha, &p.beta)?,
    };
    let epsilon = match epsilon {
        Some(e) => e.clone(),
        None => s.choose_epsilon(&p.h, &p.b, &p.alpha, &p.beta, &delta, &cone.value)?,
    };
    let certified = cone.certified;
    let data = s.support_property_with(&p, cone, delta, epsilon)?;
    let certificate: Vec<Value> = data
        .cone_constant
        .certificate
        .iter()
        .map(|c| json!({ "face": c.face, "point": rats(&c.point), "ratio": rat(&c.ratio) }))
        .collect();
    let mut r = Report::new();
    r.put("cone_constant", rat(&data.cone_constant.value))
        .put("cone_certified", certified)
        .put("certificate", certificate)
        .put("delta", rat(&data.delta))
        .put("epsilon", rat(&data.epsilon))
        .put(
            "kernel",
            Value::Array(data.kernel.basis.iter().map(|v| rats(v)).collect()),
        )
        .put("minors", rats(&data.minors))
        .put("negative_definite", data.negative_definite);
    if emit_form {
        let rows = data.form.matrix().to_rows();
        r.put(
            "form",
            Value::Array(rows.iter().map(|row| rats(row)).collect()),
        );
    }
    r.put(
        "verdict",
        if certified && data.negative_definite {
            "PASS"
        } else {
            "FAIL"
        },
    );
    r.emit(cli.json);
    if !certified {
        return Err(
            stabkit::Error::Certification("cone constant face budget exhausted".into()).into(),
        );
    }
    Ok(if data.negative_definite {
        Verdict::Pass
    } else {
        Verdict::Negative
    })
}

fn chamber_check(cli: &Cli, point: &Point) -> Result<Verdict> {
    let s = load_surface(cli)?;
    let p = params(&s, point)?;
    let v = s.is_geometric(&p);
    let mut r = Report::new();
    r.put("inside", v.inside)
        .put("margin", v.margin.as_ref().map_or(Value::Null, rat))
        .put("phi", v.phi.as_ref().map_or(Value::Null, ext))
        .put(
            "blocking",
            v.blocking
                .map_or(Value::Null, |b| Value::String(b.as_str().into())),
        );
    r.emit(cli.json);
    if v.blocking == Some(Blocking::ProviderUnknown) {
        return Err(stabkit::Error::Unknown("provider cannot decide at this β".into()).into());
    }
    Ok(if v.inside {
        Verdict::Pass
    } else {
        Verdict::Negative
    })
}

fn character_source(cli: &Cli, s: &Surface, src: &SourceArgs) -> Result<Option<CharacterSource>> {
    let rho = s.rank();
    if let Some(den) = src.witness_den {
        let two = Rational::from_integer(2.into());
        let c_box = src
            .c_box
            .clone()
            .map(|l| l.0)
            .unwrap_or_else(|| vec![(-two.clone(), two); rho]);
        return Ok(Some(CharacterSource::Witnesses(WitnessBounds {
            max_denominator: den,
            c_box,
        })));
    }
    if let Some(r_max) = src.r_max {
        let c1 = src
            .c1_box
            .clone()
            .map(|l| l.0)
            .ok_or_else(|| anyhow!("--r-max needs --c1-box"))?;
        let ch2 = src
            .ch2_range
            .clone()
            .ok_or_else(|| anyhow!("--r-max needs --ch2-range"))?;
        let mut b = EnumerationBounds::new(r_max, c1, ch2);
        if let Some(cap) = cli.budget {
            b.cap = cap;
        }
        return Ok(Some(CharacterSource::Box(b)));
    }
    Ok(None)
}

/// Characters of a source, with box enumerations sharded over `--jobs`.
fn gather(cli: &Cli, s: &Surface, source: &CharacterSource) -> Result<Vec<Character>> {
    match source {
        CharacterSource::Box(bounds) => {
            let n = s.enumerate_integral_characters(bounds)?.block_count();
            let jobs = cli.jobs.max(1) as u64;
            let shards: Vec<(u64, u64)> = (0..jobs)
                .map(|i| (i * n / jobs, (i + 1) * n / jobs))
                .collect();
            parallel_chunks(&shards, cli.jobs, |chunk| {
                let mut out = Vec::new();
                for &(a, b) in chunk {
                    out.extend(s.enumerate_integral_characters(bounds)?.blocks(a, b));
                }
                Ok(out)
            })
        }
        CharacterSource::Witnesses(_) => Ok(s.characters(source)?),
    }
}

fn chamber_sweep(cli: &Cli, pol: &Polarization, g: &Grid, src: &SourceArgs) -> Result<Verdict> {
    let s = load_surface(cli)?;
    let (h, b) = resolve(&s, pol)?;
    let (from, to, step) = grid(g)?;
    let betas = grid_points(&from, &to, &step)?;
    let segments: Vec<WallSegment> = match character_source(cli, &s, src)? {
        Some(source) => s.wall_segments(&h, &b, gather(cli, &s, &source)?)?,
        None => Vec::new(),
    };
    let rows: Vec<SweepRow> = parallel_chunks(&betas, cli.jobs, |chunk| {
        Ok(s.sweep_rows(&h, &b, chunk, &segments)?)
    })?;
    let show = |x: &Option<Rational>| x.as_ref().map_or(String::new(), |v| v.to_string());
    let table: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.beta.to_string(),
                r.phi.as_ref().map_or("unknown".into(), |p| p.to_string()),
                r.upper_bound.to_string(),
                show(&r.envelope),
                r.nef_margin.to_string(),
            ]
        })
        .collect();
    let header: Vec<String> = ["beta", "phi", "upper_bound", "envelope", "nef_margin"]
        .map(String::from)
        .to_vec();
    write_csv(cli, &header, &table, true)?;
    write_svg(cli, || {
        let env = upper_envelope(&segments);
        svg::plot(
            &format!("Geometric chamber boundary on {}", s.name()),
            "beta",
            "alpha",
            &[
                Series {
                    label: "BG bound".into(),
                    color: "gray",
                    points: rows
                        .iter()
                        .map(|r| (f(&r.beta), f(&r.upper_bound)))
                        .collect(),
                    markers: false,
                },
                Series {
                    label: "phi".into(),
                    color: "blue",
                    points: rows
                        .iter()
                        .filter_map(|r| r.phi.as_ref().map(|p| (f(&r.beta), ext_f(p))))
                        .collect(),
                    markers: false,
                },
                Series {
                    label: "walls".into(),
                    color: "red",
                    points: env
                        .iter()
                        .filter(|(beta, _)| *beta >= from && *beta <= to)
                        .map(|(beta, a)| (f(beta), f(a)))
                        .collect(),
                    markers: true,
                },
            ],
        )
    })?;
    let mut r = Report::new();
    r.put("rows", rows.len())
        .put("wall_segments", segments.len())
        .put("unknown", rows.iter().filter(|r| r.phi.is_none()).count());
    if cli.json {
        let json_rows: Vec<Value> = table
            .iter()
            .map(|t| {
                Value::Object(
                    header
                        .iter()
                        .cloned()
                        .zip(t.iter().map(|v| json!(v)))
                        .collect(),
                )
            })
            .collect();
        r.put("table", json_rows);
    }
    if cli.csv.is_some() || cli.json {
        r.emit(cli.json);
    }
    Ok(Verdict::Pass)
}

fn random_rational(rng: &mut ChaCha8Rng, max_den: i64, span: i64) -> Rational {
    let d = rng.gen_range(1..=max_den);
    Rational::new(rng.gen_range(-span * d..=span * d).into(), d.into())
}

fn quotient_verify(cli: &Cli, file: Option<&std::path::Path>, samples: usize) -> Result<Verdict> {
    let d = load_quotient(cli, file)?;
    let (base, cover) = (d.base(), d.cover());
    let order = Rational::from_integer(d.group_order().into());
    let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
    let mut failures = Vec::new();
    let ghat = d.ghat_action_on_knum();
    if !ghat.identity {
        failures.push("dual group acts nontrivially on Knum".to_string());
    }
    let mut tested = 0;
    let mut attempts = 0;
    while tested < samples && attempts < 100 * samples.max(1) {
        attempts += 1;
        let h: Vec<Rational> = (0..base.rank())
            .map(|_| Rational::from_integer(rng.gen_range(-1..6).into()))
            .collect();
        if !base.is_ample(&h) {
            continue;
        }
        let b: Vec<Rational> = (0..base.rank())
            .map(|_| random_rational(&mut rng, 4, 2))
            .collect();
        let py = Params::new(
            h,
            b,
            random_rational(&mut rng, 8, 4),
            random_rational(&mut rng, 8, 4),
        );
        let px = d.pullback_params(&py)?;
        let z = cover.charge_functional(&px)?;
        if d.double_induction(&px)? != z.scale(&order) {
            failures.push(format!("double induction is not |G|·Z at {py:?}"));
        }
        let x = random_rational(&mut rng, 8, 3);
        if base.phi(&py.h, &py.b, &x)? != cover.phi(&px.h, &px.b, &x)? {
            failures.push(format!("Le Potier transfer fails at x = {x}"));
        }
        let ch0 = Rational::from_integer(rng.gen_range(1..5).into());
        let c1: Vec<Rational> = (0..base.rank())
            .map(|_| random_rational(&mut rng, 3, 3))
            .collect();
        let v = Character::new(ch0, c1, random_rational(&mut rng, 4, 4));
        let pv = d.pullback_chern(&v)?;
        let same_mu: bool = base.mu_h(&py.h, &v)? == cover.mu_h(&px.h, &pv)?;
        let same_nu = base.nu_hb(&py.h, &py.b, &v)? == cover.nu_hb(&px.h, &px.b, &pv)?;
        if !(same_mu && same_nu) {
            failures.push(format!("μ or ν changes under pullback of {v}"));
        }
        if base.is_geometric(&py).inside != cover.is_geometric(&px).inside {
            failures.push(format!("chamber verdicts differ at {py:?}"));
        }
        tested += 1;
    }
    let mut r = Report::new();
    r.put("group_order", d.group_order())
        .put("action_image", d.action_image_size())
        .put("projection_formula", true)
        .put("ghat_trivial_on_knum", ghat.identity)
        .put("samples", tested)
        .put("seed", cli.seed)
        .put("failures", failures.clone());
    r.emit(cli.json);
    Ok(if failures.is_empty() {
        Verdict::Pass
    } else {
        Verdict::Negative
    })
}

fn quotient_induce(cli: &Cli, point: &Point) -> Result<Verdict> {
    let d = load_quotient(cli, None)?;
    let px = point_params(d.cover().rank(), point)?;
    let induced = d.induce_central_charge(&px)?;
    let n = &induced.normalized;
    let mut r = Report::new();
    r.put("re", rats(&induced.functional.re))
        .put("im", rats(&induced.functional.im))
        .put("point_value", rat(&induced.point_value))
        .put("H", rats(&n.h))
        .put("B", rats(&n.b))
        .put("alpha", rat(&n.alpha))
        .put("beta", rat(&n.beta));
    r.emit(cli.json);
    Ok(Verdict::Pass)
}

fn chern_enumerate(
    cli: &Cli,
    r_max: u64,
    c1_box: &[(i64, i64)],
    ch2: &(Rational, Rational),
) -> Result<Verdict> {
    let s = load_surface(cli)?;
    let mut bounds = EnumerationBounds::new(r_max, c1_box.to_vec(), ch2.clone());
    if let Some(cap) = cli.budget {
        bounds.cap = cap;
    }
    let chars = gather(cli, &s, &CharacterSource::Box(bounds))?;
    let mut header = vec!["ch0".to_string()];
    header.extend((1..=s.rank()).map(|i| format!("ch1_{i}")));
    header.push("ch2".into());
    let table: Vec<Vec<String>> = chars
        .iter()
        .map(|v| v.to_vec().iter().map(|x| x.to_string()).collect())
        .collect();
    write_csv(cli, &header, &table, true)?;
    let mut r = Report::new();
    r.put("count", chars.len());
    if cli.json {
        r.put(
            "characters",
            chars.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
        );
    }
    if cli.csv.is_some() || cli.json {
        r.emit(cli.json);
    }
    Ok(Verdict::Pass)
}

fn chern_info(cli: &Cli, pol: &Polarization, v: &Character) -> Result<Verdict> {
    let s = load_surface(cli)?;
    let (h, b) = resolve(&s, pol)?;
    let tw = s.twist(v, &b)?;
    let mut r = Report::new();
    r.put("twisted", tw.to_string())
        .put(
            "mu",
            match s.mu_h(&h, v)? {
                Slope::Finite(m) => rat(&m),
                Slope::PosInfinity => Value::String("+inf".into()),
            },
        )
        .put(
            "nu",
            s.nu_hb(&h, &b, v).ok().as_ref().map_or(Value::Null, rat),
        )
        .put("q_bg", rat(&s.q_bg_value(v)?))
        .put("integral", v.is_integral(s.chtwo_denominator()));
    if v.ch0 > Rational::from_integer(0.into()) {
        if let Slope::Finite(mu) = s.mu_h(&h, v)? {
            r.put("phi_at_mu", phi_value(&s.phi(&h, &b, &mu)));
        }
    }
    r.emit(cli.json);
    Ok(Verdict::Pass)
}
