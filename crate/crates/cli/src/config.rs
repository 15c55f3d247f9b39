//! The configuration document: orbits, curves, covers, count tables and
//! necks, cross-referenced by name.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;
use std::sync::Arc;

use localsft::covers::{BaseCurve, BaseCurveData, CoverSpec};
use localsft::exceptional::NeckConfiguration;
use localsft::potentials::{CountTable, TableContext};
use localsft::{parse_theta, EndSign, Error as CoreError, OrbitRegistry, Rational, ReebOrbit};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigDocument {
    pub truncation: u32,
    #[serde(default)]
    pub orbits: Vec<OrbitDecl>,
    #[serde(default)]
    pub curves: Vec<CurveDecl>,
    #[serde(default)]
    pub covers: Vec<CoverDecl>,
    #[serde(default)]
    pub tables: Vec<TableDecl>,
    #[serde(default)]
    pub necks: Vec<NeckDecl>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KindDecl {
    Elliptic,
    Hyperbolic,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrbitDecl {
    pub name: String,
    pub kind: KindDecl,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cz1: Option<i64>,
    pub max_iterate: u32,
}

/// Either a full curve declaration or `orbit_cylinder = "<orbit>"`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveDecl {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub orbit_cylinder: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub positive: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub negative: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub index: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rel_c1_doubled: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub immersed: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub closed: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub components: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoverDecl {
    pub name: String,
    pub curve: String,
    pub degree: u32,
    #[serde(default)]
    pub positive: Vec<String>,
    #[serde(default)]
    pub negative: Vec<String>,
    #[serde(default)]
    pub marked_points: u32,
    #[serde(default)]
    pub constrained: u32,
    #[serde(default = "one")]
    pub components: u32,
}

fn one() -> u32 {
    1
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableDecl {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub orbit: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub curve: Option<String>,
    #[serde(default)]
    pub entries: Vec<EntryDecl>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntryDecl {
    #[serde(default)]
    pub positive: Vec<String>,
    #[serde(default)]
    pub negative: Vec<String>,
    pub count: String,
}

/// Either the exceptional sphere broken along `orbits`, or explicit
/// `upper`/`lower` pieces.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NeckDecl {
    pub name: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub orbits: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub upper: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lower: Option<String>,
    #[serde(default = "yes")]
    pub separating: bool,
    #[serde(default = "yes")]
    pub morse: bool,
}

fn yes() -> bool {
    true
}

impl FromStr for ConfigDocument {
    type Err = CliError;

    fn from_str(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| {
            let (line, column) = e.span().map(|s| line_col(text, s.start)).unwrap_or((1, 1));
            CliError::Parse {
                line,
                column,
                message: e.message().to_string(),
            }
        })
    }
}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

impl ConfigDocument {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        text.parse()
    }

    pub fn render(&self) -> String {
        toml::to_string(self).expect("configuration documents always serialise")
    }
}

fn rational(s: &str) -> Result<Rational, CoreError> {
    Rational::from_str(s.trim()).map_err(|_| CoreError::Parse(format!("`{s}` is not an exact rational a/b")))
}

/// A document with every name resolved.
#[derive(Debug)]
pub struct Model {
    pub truncation: u32,
    pub registry: OrbitRegistry,
    pub curves: BTreeMap<String, Arc<BaseCurve>>,
    pub covers: Vec<(String, CoverSpec)>,
    pub tables: Vec<(String, CountTable)>,
    pub necks: Vec<(String, NeckConfiguration)>,
}

impl Model {
    pub fn build(doc: &ConfigDocument, truncation: Option<u32>) -> Result<Self, CoreError> {
        let truncation = truncation.unwrap_or(doc.truncation);
        if truncation == 0 {
            return Err(CoreError::Parse("truncation must be positive".into()));
        }
        let mut registry = OrbitRegistry::new();
        for o in &doc.orbits {
            let orbit = match (o.kind, &o.theta, o.cz1) {
                (KindDecl::Elliptic, Some(theta), None) => ReebOrbit::elliptic(&o.name, parse_theta(theta)?, o.max_iterate)?,
                (KindDecl::Hyperbolic, None, Some(cz1)) => ReebOrbit::hyperbolic(&o.name, cz1, o.max_iterate)?,
                _ => {
                    return Err(CoreError::InvalidOrbit {
                        name: o.name.clone(),
                        reason: "elliptic orbits take `theta`, hyperbolic orbits take `cz1`".into(),
                    })
                }
            };
            registry.insert(orbit)?;
        }

        let mut curves = BTreeMap::new();
        for c in &doc.curves {
            let curve = curve(&registry, c)?;
            if curves.insert(c.name.clone(), Arc::new(curve)).is_some() {
                return Err(CoreError::RegistryMismatch(format!("curve `{}` declared twice", c.name)));
            }
        }
        let find_curve = |name: &str| {
            curves.get(name).cloned().ok_or_else(|| CoreError::UnknownName {
                kind: "curve",
                name: name.to_string(),
            })
        };

        let mut covers = Vec::new();
        for c in &doc.covers {
            let spec = CoverSpec::with_points(
                find_curve(&c.curve)?,
                c.degree,
                registry.collection(EndSign::Positive, &c.positive)?,
                registry.collection(EndSign::Negative, &c.negative)?,
                c.marked_points,
                c.constrained,
                c.components,
            )?;
            covers.push((c.name.clone(), spec));
        }

        let mut tables = Vec::new();
        for t in &doc.tables {
            let context = match (&t.orbit, &t.curve) {
                (Some(o), None) => TableContext::Orbit(registry.get(o)?.clone()),
                (None, Some(c)) => TableContext::Curve(find_curve(c)?),
                _ => {
                    return Err(CoreError::InadmissibleKey(format!(
                        "table `{}` needs exactly one of `orbit` and `curve`",
                        t.name
                    )))
                }
            };
            let entries = t
                .entries
                .iter()
                .map(|e| {
                    Ok((
                        registry.collection(EndSign::Positive, &e.positive)?,
                        registry.collection(EndSign::Negative, &e.negative)?,
                        rational(&e.count)?,
                    ))
                })
                .collect::<Result<Vec<_>, CoreError>>()?;
            tables.push((t.name.clone(), CountTable::new(context, entries)?));
        }

        let mut necks = Vec::new();
        for n in &doc.necks {
            let neck = match (&n.upper, &n.lower) {
                (None, None) => {
                    if !n.separating {
                        return Err(CoreError::PipelineHypothesis(
                            "only separating hypersurfaces are supported".into(),
                        ));
                    }
                    let orbits = n.orbits.iter().map(|o| registry.get(o).cloned()).collect::<Result<Vec<_>, _>>()?;
                    NeckConfiguration::exceptional(&orbits, n.morse)?
                }
                (Some(u), Some(l)) => NeckConfiguration::new(find_curve(u)?, find_curve(l)?, n.separating, n.morse)?,
                _ => {
                    return Err(CoreError::InvalidCurve {
                        name: n.name.clone(),
                        reason: "a neck needs both `upper` and `lower`, or neither".into(),
                    })
                }
            };
            necks.push((n.name.clone(), neck));
        }

        Ok(Model {
            truncation,
            registry,
            curves,
            covers,
            tables,
            necks,
        })
    }

    pub fn curve(&self, name: &str) -> Result<&Arc<BaseCurve>, CoreError> {
        self.curves.get(name).ok_or_else(|| CoreError::UnknownName {
            kind: "curve",
            name: name.to_string(),
        })
    }

    pub fn table(&self, name: &str) -> Result<&CountTable, CoreError> {
        self.tables
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, t)| t)
            .ok_or_else(|| CoreError::UnknownName {
                kind: "table",
                name: name.to_string(),
            })
    }
}

fn curve(registry: &OrbitRegistry, c: &CurveDecl) -> Result<BaseCurve, CoreError> {
    if let Some(orbit) = &c.orbit_cylinder {
        let extra = !c.positive.is_empty()
            || !c.negative.is_empty()
            || c.index.is_some()
            || c.rel_c1_doubled.is_some()
            || c.closed.is_some()
            || c.components.is_some();
        if extra {
            return Err(CoreError::InvalidCurve {
                name: c.name.clone(),
                reason: "an orbit cylinder takes no other fields".into(),
            });
        }
        let cylinder = BaseCurve::orbit_cylinder(registry.get(orbit)?);
        return Ok(cylinder);
    }
    let missing = |field: &str| CoreError::InvalidCurve {
        name: c.name.clone(),
        reason: format!("missing `{field}`"),
    };
    let curve = BaseCurve::new(BaseCurveData {
        name: c.name.clone(),
        positive_ends: registry.collection(EndSign::Positive, &c.positive)?,
        negative_ends: registry.collection(EndSign::Negative, &c.negative)?,
        index: c.index.ok_or_else(|| missing("index"))?,
        rel_c1_doubled: c.rel_c1_doubled.ok_or_else(|| missing("rel_c1_doubled"))?,
        immersed: c.immersed.unwrap_or(true),
        components: c.components.unwrap_or(1),
    })?;
    if let Some(closed) = c.closed {
        if closed != curve.is_closed() {
            return Err(CoreError::InvalidCurve {
                name: c.name.clone(),
                reason: format!("declared closed = {closed} but the curve has {} ends", curve.puncture_count()),
            });
        }
    }
    Ok(curve)
}
