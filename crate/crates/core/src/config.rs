//! TOML surface and quotient files, plus the bundled example gallery.
//!
//! Rationals are written as strings `"p/q"` (bare integers are accepted
//! too). Surface files carry `schema = "stabkit-surface/v1"`, quotient files
//! `schema = "stabkit-quotient/v1"`.

use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::Deserialize;

use crate::chern::{EnumerationBounds, DEFAULT_ENUMERATION_CAP};
use crate::equivariant::QuotientDatum;
use crate::error::{Error, Result};
use crate::lattice::{SurfaceClass, SurfaceData, SurfaceModel};
use crate::lepotier::{
    CharacterSource, CoverMap, EmpiricalEnvelope, Interpolation, LePotierProvider, Tabulated,
    WitnessBounds,
};
use crate::linalg::Matrix;
use crate::scalar::{parse_rational, Extended};
use crate::Rational;

pub const SURFACE_SCHEMA: &str = "stabkit-surface/v1";
pub const QUOTIENT_SCHEMA: &str = "stabkit-quotient/v1";

/// `(file name, contents)` of every bundled config.
pub const BUNDLED: &[(&str, &str)] = &[
    ("abelian_rho1.cfg", include_str!("../data/abelian_rho1.cfg")),
    (
        "abelian_product.cfg",
        include_str!("../data/abelian_product.cfg"),
    ),
    (
        "curve_product.cfg",
        include_str!("../data/curve_product.cfg"),
    ),
    ("beauville.cfg", include_str!("../data/beauville.cfg")),
    (
        "beauville.quot.toml",
        include_str!("../data/beauville.quot.toml"),
    ),
    ("bielliptic2.cfg", include_str!("../data/bielliptic2.cfg")),
    (
        "bielliptic2.quot.toml",
        include_str!("../data/bielliptic2.quot.toml"),
    ),
    ("bielliptic3.cfg", include_str!("../data/bielliptic3.cfg")),
    (
        "bielliptic3.quot.toml",
        include_str!("../data/bielliptic3.quot.toml"),
    ),
];

pub fn bundled(name: &str) -> Option<&'static str> {
    BUNDLED.iter().find(|(n, _)| *n == name).map(|(_, c)| *c)
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Num {
    Str(String),
    Int(i64),
}

impl Num {
    fn parse(&self, key: &str) -> Result<Rational> {
        match self {
            Num::Int(i) => Ok(Rational::from_integer((*i).into())),
            Num::Str(s) => parse_rational(s)
                .ok_or_else(|| Error::Config(format!("{key}: cannot parse {s:?} as a rational"))),
        }
    }

    fn parse_extended(&self, key: &str) -> Result<Extended<Rational>> {
        match self {
            Num::Str(s) if matches!(s.trim(), "-inf" | "-infinity") => Ok(Extended::NegInfinity),
            _ => self.parse(key).map(Extended::Finite),
        }
    }
}

fn vector(xs: &[Num], key: &str) -> Result<Vec<Rational>> {
    xs.iter().map(|x| x.parse(key)).collect()
}

fn matrix(rows: &[Vec<Num>], key: &str) -> Result<Matrix<Rational>> {
    let rows = rows
        .iter()
        .map(|r| vector(r, key))
        .collect::<Result<Vec<_>>>()?;
    Matrix::from_rows(rows).ok_or_else(|| Error::Config(format!("{key}: ragged or empty matrix")))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SurfaceFile {
    schema: String,
    name: String,
    rank: usize,
    #[serde(default = "default_class")]
    class: String,
    gram: Vec<Vec<Num>>,
    nef_inequalities: Vec<Vec<Num>>,
    effective_generators: Vec<Vec<Num>>,
    chtwo_denominator: u64,
    lp_provider: ProviderFile,
}

fn default_class() -> String {
    "general".into()
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum ProviderFile {
    QuadraticClosedForm,
    Tabulated {
        h: Vec<Num>,
        b: Vec<Num>,
        knots: Vec<(Num, Num)>,
        rule: String,
    },
    QuotientTransfer {
        cover: String,
        group_order: u64,
        pullback_ns: Vec<Vec<Num>>,
    },
    EmpiricalEnvelope {
        source: SourceFile,
        #[serde(default)]
        bucket: Option<Num>,
    },
}

#[derive(Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
enum SourceFile {
    Box {
        r_max: u64,
        c1_box: Vec<(i64, i64)>,
        ch2_range: (Num, Num),
        #[serde(default)]
        cap: Option<u64>,
    },
    Witnesses {
        max_denominator: u64,
        c_box: Vec<(Num, Num)>,
    },
}

impl SourceFile {
    fn build(&self) -> Result<CharacterSource> {
        Ok(match self {
            SourceFile::Box {
                r_max,
                c1_box,
                ch2_range,
                cap,
            } => {
                let mut b = EnumerationBounds::new(
                    *r_max,
                    c1_box.clone(),
                    (
                        ch2_range.0.parse("ch2_range")?,
                        ch2_range.1.parse("ch2_range")?,
                    ),
                );
                b.cap = cap.unwrap_or(DEFAULT_ENUMERATION_CAP);
                CharacterSource::Box(b)
            }
            SourceFile::Witnesses {
                max_denominator,
                c_box,
            } => CharacterSource::Witnesses(WitnessBounds {
                max_denominator: *max_denominator,
                c_box: c_box
                    .iter()
                    .map(|(a, b)| Ok((a.parse("c_box")?, b.parse("c_box")?)))
                    .collect::<Result<_>>()?,
            }),
        })
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct QuotientFile {
    schema: String,
    cover: String,
    base: String,
    group_order: u64,
    pullback_ns: Vec<Vec<Num>>,
    pushforward_ns: Vec<Vec<Num>>,
    action_ns: Vec<Vec<Vec<Num>>>,
}

/// Where a config came from; references inside it resolve against this.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Origin {
    File(PathBuf),
    Bundled(String),
}

impl Origin {
    fn label(&self) -> String {
        match self {
            Origin::File(p) => p.display().to_string(),
            Origin::Bundled(n) => format!("<bundled>/{n}"),
        }
    }

    fn resolve(&self, reference: &str) -> Origin {
        match self {
            Origin::File(p) => {
                let candidate = p.parent().unwrap_or(Path::new(".")).join(reference);
                if candidate.exists() || bundled(reference).is_none() {
                    Origin::File(candidate)
                } else {
                    Origin::Bundled(reference.to_string())
                }
            }
            Origin::Bundled(_) => Origin::Bundled(reference.to_string()),
        }
    }

    fn read(&self) -> Result<String> {
        match self {
            Origin::File(p) => {
                fs::read_to_string(p).map_err(|e| Error::Config(format!("{}: {e}", p.display())))
            }
            Origin::Bundled(n) => bundled(n)
                .map(str::to_string)
                .ok_or_else(|| Error::Config(format!("no bundled config named {n:?}"))),
        }
    }
}

fn locate(path: &Path) -> Origin {
    if path.exists() {
        return Origin::File(path.to_path_buf());
    }
    match path.file_name().and_then(|n| n.to_str()) {
        Some(n) if bundled(n).is_some() => Origin::Bundled(n.to_string()),
        _ => Origin::File(path.to_path_buf()),
    }
}

fn parse_toml<D: serde::de::DeserializeOwned>(origin: &Origin, text: &str) -> Result<D> {
    toml::from_str(text).map_err(|e| Error::Config(format!("{}: {e}", origin.label())))
}

fn check_schema(origin: &Origin, found: &str, expected: &str) -> Result<()> {
    if found != expected {
        return Err(Error::Config(format!(
            "{}: unsupported schema {found:?}, expected {expected:?}",
            origin.label()
        )));
    }
    Ok(())
}

/// Loads a surface file. A path that does not exist but names a bundled
/// config loads the bundled one.
pub fn load_surface(path: impl AsRef<Path>) -> Result<SurfaceModel> {
    load_surface_from(&locate(path.as_ref()), &mut HashSet::new())
}

/// Parses a surface file from a string; quotient-transfer covers are looked
/// up among the bundled configs and then relative to `base_dir`.
pub fn parse_surface(text: &str, base_dir: Option<&Path>) -> Result<SurfaceModel> {
    let origin = match base_dir {
        Some(d) => Origin::File(d.join("<inline>")),
        None => Origin::Bundled("<inline>".into()),
    };
    surface_from_text(&origin, text, &mut HashSet::new())
}

fn load_surface_from(origin: &Origin, seen: &mut HashSet<Origin>) -> Result<SurfaceModel> {
    if !seen.insert(origin.clone()) {
        return Err(Error::Config(format!(
            "{}: cyclic cover reference",
            origin.label()
        )));
    }
    let text = origin.read()?;
    let out = surface_from_text(origin, &text, seen);
    seen.remove(origin);
    out
}

fn surface_from_text(
    origin: &Origin,
    text: &str,
    seen: &mut HashSet<Origin>,
) -> Result<SurfaceModel> {
    let f: SurfaceFile = parse_toml(origin, text)?;
    check_schema(origin, &f.schema, SURFACE_SCHEMA)?;
    let ctx = |e: Error| match e {
        Error::Config(m) => Error::Config(format!("{}: {m}", origin.label())),
        other => other,
    };
    let gram = matrix(&f.gram, "gram").map_err(ctx)?;
    if gram.rows() != f.rank || gram.cols() != f.rank {
        return Err(Error::Config(format!(
            "{}: rank = {} but gram is {}×{}",
            origin.label(),
            f.rank,
            gram.rows(),
            gram.cols()
        )));
    }
    let class = SurfaceClass::parse(&f.class)
        .ok_or_else(|| Error::Config(format!("{}: unknown class {:?}", origin.label(), f.class)))?;
    let rows = |xs: &[Vec<Num>], key: &str| -> Result<Vec<Vec<Rational>>> {
        xs.iter()
            .map(|r| vector(r, key))
            .collect::<Result<_>>()
            .map_err(ctx)
    };
    let lp_provider = match &f.lp_provider {
        ProviderFile::QuadraticClosedForm => LePotierProvider::QuadraticClosedForm,
        ProviderFile::Tabulated { h, b, knots, rule } => LePotierProvider::Tabulated(Tabulated {
            h: vector(h, "lp_provider.h").map_err(ctx)?,
            b: vector(b, "lp_provider.b").map_err(ctx)?,
            knots: knots
                .iter()
                .map(|(x, v)| Ok((x.parse("knots")?, v.parse_extended("knots")?)))
                .collect::<Result<_>>()
                .map_err(ctx)?,
            rule: Interpolation::parse(rule).ok_or_else(|| {
                Error::Config(format!(
                    "{}: unknown interpolation rule {rule:?}",
                    origin.label()
                ))
            })?,
        }),
        ProviderFile::QuotientTransfer {
            cover,
            group_order,
            pullback_ns,
        } => {
            let cover = load_surface_from(&origin.resolve(cover), seen)?;
            LePotierProvider::QuotientTransfer(CoverMap {
                group_order: *group_order,
                pullback_ns: matrix(pullback_ns, "lp_provider.pullback_ns").map_err(ctx)?,
                cover: Arc::new(cover),
            })
        }
        ProviderFile::EmpiricalEnvelope { source, bucket } => {
            LePotierProvider::EmpiricalEnvelope(EmpiricalEnvelope {
                source: source.build().map_err(ctx)?,
                bucket: match bucket {
                    Some(b) => b.parse("bucket").map_err(ctx)?,
                    None => Rational::from_integer(0.into()),
                },
            })
        }
    };
    SurfaceModel::new(SurfaceData {
        name: f.name,
        gram,
        nef_inequalities: rows(&f.nef_inequalities, "nef_inequalities")?,
        effective_generators: rows(&f.effective_generators, "effective_generators")?,
        chtwo_denominator: f.chtwo_denominator,
        class,
        lp_provider,
    })
}

/// Loads a quotient file and both surfaces it references.
pub fn load_quotient(path: impl AsRef<Path>) -> Result<QuotientDatum> {
    let origin = locate(path.as_ref());
    let text = origin.read()?;
    let f: QuotientFile = parse_toml(&origin, &text)?;
    check_schema(&origin, &f.schema, QUOTIENT_SCHEMA)?;
    let ctx = |e: Error| match e {
        Error::Config(m) => Error::Config(format!("{}: {m}", origin.label())),
        other => other,
    };
    let cover = Arc::new(load_surface_from(
        &origin.resolve(&f.cover),
        &mut HashSet::new(),
    )?);
    let base = Arc::new(load_surface_from(
        &origin.resolve(&f.base),
        &mut HashSet::new(),
    )?);
    let pullback = matrix(&f.pullback_ns, "pullback_ns").map_err(ctx)?;
    let pushforward = matrix(&f.pushforward_ns, "pushforward_ns").map_err(ctx)?;
    let action = f
        .action_ns
        .iter()
        .map(|m| matrix(m, "action_ns"))
        .collect::<Result<Vec<_>>>()
        .map_err(ctx)?;
    if let LePotierProvider::QuotientTransfer(m) = base.lp_provider() {
        if m.pullback_ns != pullback || m.group_order != f.group_order {
            return Err(Error::InvalidQuotient(
                "base surface's quotient-transfer provider disagrees with the quotient file".into(),
            ));
        }
    }
    QuotientDatum::new(f.group_order, pullback, pushforward, cover, base, action)
}
