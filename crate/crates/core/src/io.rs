//! The `.kx` instance format: a versioned TOML document.
//!
//! ```toml
//! version = 1
//!
//! [meta]
//! name = "example"
//! seed = 7                      # optional
//!
//! [system]
//! kind = "set_packing"          # or "explicit"
//! k = 2
//! elements = ["e1", "e2", "e3"]
//! items = ["u1", "u2", "u3"]    # set_packing only
//! sets = [["u1", "u2"], ["u2"], ["u3"]]
//! # explicit: maximal_sets = [["e1", "e3"], ["e2", "e3"]]
//!
//! [objective]
//! kind = "coverage"             # or "linear"
//! universe = ["a", "b"]
//! covers = [["a"], ["a", "b"], ["b"]]
//! item_weights = ["1", "3/2"]   # optional, parallel to universe
//! # linear: weights = ["2", "1/2", "0.25"], parallel to elements
//! ```

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::objective::{CoverageObjective, LinearObjective, Objective};
use crate::rational::{parse_rational, Rational};
use crate::systems::{ExplicitSystem, IndependenceSystem, SetPackingSystem, System};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceFile {
    version: u32,
    #[serde(default)]
    meta: Meta,
    system: SystemSection,
    objective: ObjectiveSection,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Meta {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum SystemSection {
    Explicit {
        k: usize,
        elements: Vec<String>,
        maximal_sets: Vec<Vec<String>>,
    },
    SetPacking {
        k: usize,
        elements: Vec<String>,
        items: Vec<String>,
        sets: Vec<Vec<String>>,
    },
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum ObjectiveSection {
    Coverage {
        universe: Vec<String>,
        covers: Vec<Vec<String>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        item_weights: Option<Vec<Number>>,
    },
    Linear {
        weights: Vec<Number>,
    },
}

/// A rational written as a string (`"3/2"`, `"0.25"`) or a plain integer.
#[derive(Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum Number {
    Integer(i64),
    Text(String),
}

impl Number {
    fn to_rational(&self, context: &str) -> Result<Rational> {
        match self {
            Number::Integer(v) => Ok(Rational::from_integer(*v as i128)),
            Number::Text(s) => parse_rational(s)
                .map_err(|_| Error::Semantic(format!("{context}: {s:?} is not a rational number"))),
        }
    }

    fn from_rational(r: &Rational) -> Number {
        Number::Text(r.to_string())
    }
}

fn index_map<'a>(names: &'a [String], what: &str) -> Result<HashMap<&'a str, usize>> {
    let mut map = HashMap::with_capacity(names.len());
    for (i, name) in names.iter().enumerate() {
        if map.insert(name.as_str(), i).is_some() {
            return Err(Error::Semantic(format!("duplicate {what} {name:?}")));
        }
    }
    Ok(map)
}

fn resolve(
    map: &HashMap<&str, usize>,
    names: &[String],
    what: &str,
    context: &str,
) -> Result<Vec<usize>> {
    names
        .iter()
        .map(|name| {
            map.get(name.as_str())
                .copied()
                .ok_or_else(|| Error::Semantic(format!("{context}: unknown {what} {name:?}")))
        })
        .collect()
}

fn position(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

fn context_error(e: Error, context: String) -> Error {
    match e {
        Error::Semantic(msg) | Error::Domain(msg) | Error::Precondition(msg) => {
            Error::Semantic(format!("{context}: {msg}"))
        }
        other => Error::Semantic(format!("{context}: {other}")),
    }
}

/// Parses a `.kx` document.
pub fn parse_instance(text: &str) -> Result<Instance> {
    let file: InstanceFile = toml::from_str(text).map_err(|e| {
        let (line, column) = e.span().map_or((1, 1), |span| position(text, span.start));
        Error::Syntax {
            line,
            column,
            message: e.message().trim().to_string(),
        }
    })?;
    if file.version != FORMAT_VERSION {
        return Err(Error::Semantic(format!(
            "unsupported format version {} (expected {FORMAT_VERSION})",
            file.version
        )));
    }

    let (labels, system) = match &file.system {
        SystemSection::Explicit {
            k,
            elements,
            maximal_sets,
        } => {
            let map = index_map(elements, "element")?;
            let sets = maximal_sets
                .iter()
                .enumerate()
                .map(|(i, set)| resolve(&map, set, "element", &format!("system.maximal_sets[{i}]")))
                .collect::<Result<Vec<_>>>()?;
            let system = ExplicitSystem::new(elements.len(), sets, *k)
                .map_err(|e| context_error(e, "system".into()))?;
            (elements.clone(), System::Explicit(system))
        }
        SystemSection::SetPacking {
            k,
            elements,
            items,
            sets,
        } => {
            index_map(elements, "element")?;
            if sets.len() != elements.len() {
                return Err(Error::Semantic(format!(
                    "system.sets has {} entries for {} elements",
                    sets.len(),
                    elements.len()
                )));
            }
            let map = index_map(items, "item")?;
            let resolved = sets
                .iter()
                .zip(elements)
                .map(|(set, e)| {
                    resolve(&map, set, "item", &format!("system.sets for element {e:?}"))
                })
                .collect::<Result<Vec<_>>>()?;
            let system = SetPackingSystem::new(items.clone(), resolved, *k)
                .map_err(|e| context_error(e, "system".into()))?;
            (elements.clone(), System::SetPacking(system))
        }
    };
    if labels.is_empty() {
        return Err(Error::Semantic("system declares no elements".into()));
    }

    let objective = match &file.objective {
        ObjectiveSection::Coverage {
            universe,
            covers,
            item_weights,
        } => {
            if covers.len() != labels.len() {
                return Err(Error::Semantic(format!(
                    "objective.covers has {} entries for {} elements",
                    covers.len(),
                    labels.len()
                )));
            }
            let map = index_map(universe, "universe item")?;
            let resolved = covers
                .iter()
                .zip(&labels)
                .map(|(c, e)| {
                    resolve(
                        &map,
                        c,
                        "universe item",
                        &format!("objective.covers for element {e:?}"),
                    )
                })
                .collect::<Result<Vec<_>>>()?;
            let weights = match item_weights {
                None => None,
                Some(ws) => Some(
                    ws.iter()
                        .enumerate()
                        .map(|(i, w)| w.to_rational(&format!("objective.item_weights[{i}]")))
                        .collect::<Result<Vec<_>>>()?,
                ),
            };
            let objective = CoverageObjective::new(universe.clone(), resolved, weights)
                .map_err(|e| context_error(e, "objective".into()))?;
            Objective::Coverage(objective)
        }
        ObjectiveSection::Linear { weights } => {
            if weights.len() != labels.len() {
                return Err(Error::Semantic(format!(
                    "objective.weights has {} entries for {} elements",
                    weights.len(),
                    labels.len()
                )));
            }
            let ws = weights
                .iter()
                .zip(&labels)
                .map(|(w, e)| w.to_rational(&format!("objective.weights for element {e:?}")))
                .collect::<Result<Vec<_>>>()?;
            Objective::Linear(
                LinearObjective::new(ws).map_err(|e| context_error(e, "objective".into()))?,
            )
        }
    };

    let name = file.meta.name.clone().unwrap_or_default();
    let mut instance = Instance::new(name, labels, system, objective)?;
    instance.seed = file.meta.seed;
    Ok(instance)
}

fn names(all: &[String], indices: &[usize]) -> Vec<String> {
    indices.iter().map(|&i| all[i].clone()).collect()
}

/// Writes `instance` as a `.kx` document; [`parse_instance`] reads it back
/// to an equal instance.
pub fn serialize_instance(instance: &Instance) -> Result<String> {
    let labels = &instance.labels;
    let system = match &instance.system {
        System::Explicit(s) => SystemSection::Explicit {
            k: s.exchange_k(),
            elements: labels.clone(),
            maximal_sets: s.maximal_sets().iter().map(|m| names(labels, m)).collect(),
        },
        System::SetPacking(s) => SystemSection::SetPacking {
            k: s.k(),
            elements: labels.clone(),
            items: s.items().to_vec(),
            sets: (0..labels.len())
                .map(|e| names(s.items(), s.set_of(e)))
                .collect(),
        },
    };
    let objective = match &instance.objective {
        Objective::Coverage(c) => ObjectiveSection::Coverage {
            universe: c.universe().to_vec(),
            covers: (0..labels.len())
                .map(|e| names(c.universe(), c.covers(e)))
                .collect(),
            item_weights: if c.has_unit_weights() {
                None
            } else {
                Some(c.item_weights().iter().map(Number::from_rational).collect())
            },
        },
        Objective::Linear(l) => ObjectiveSection::Linear {
            weights: l.weights().iter().map(Number::from_rational).collect(),
        },
    };
    let file = InstanceFile {
        version: FORMAT_VERSION,
        meta: Meta {
            name: if instance.name.is_empty() {
                None
            } else {
                Some(instance.name.clone())
            },
            seed: instance.seed,
        },
        system,
        objective,
    };
    toml::to_string(&file).map_err(|e| Error::Invariant(format!("serialization failed: {e}")))
}

pub fn load_instance(path: &Path) -> Result<Instance> {
    let text =
        fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_instance(&text)
}

pub fn save_instance(instance: &Instance, path: &Path) -> Result<()> {
    fs::write(path, serialize_instance(instance)?)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::objective::SetFunction;
    use crate::rational::rational;
    use crate::ObjectiveValue;

    #[test]
    fn bundled_fixture_parses_to_two_bases() {
        let inst = parse_instance(fixtures::TWO_BASES_KX).unwrap();
        assert_eq!(inst, fixtures::two_bases());
        assert_eq!(inst.n(), 4);
        assert_eq!(inst.k(), 2);
        assert_eq!(
            inst.objective.value(&[0, 1, 2, 3]).unwrap(),
            ObjectiveValue::from_integer(6)
        );
    }

    #[test]
    fn round_trip_explicit() {
        let inst = fixtures::two_bases().with_seed(9);
        let text = serialize_instance(&inst).unwrap();
        assert_eq!(parse_instance(&text).unwrap(), inst);
    }

    #[test]
    fn round_trip_packing_with_weights() {
        let text = r#"
version = 1
[meta]
name = "w"
[system]
kind = "set_packing"
k = 2
elements = ["p", "q", "r"]
items = ["u1", "u2", "u3"]
sets = [["u1", "u2"], ["u2"], ["u3"]]
[objective]
kind = "coverage"
universe = ["a", "b"]
covers = [["a"], ["a", "b"], ["b"]]
item_weights = ["1", "3/2"]
"#;
        let inst = parse_instance(text).unwrap();
        assert_eq!(
            inst.objective.value(&[1]).unwrap(),
            ObjectiveValue(rational(5, 2))
        );
        let again = parse_instance(&serialize_instance(&inst).unwrap()).unwrap();
        assert_eq!(again, inst);
    }

    #[test]
    fn round_trip_linear() {
        let text = r#"
version = 1
[system]
kind = "explicit"
k = 1
elements = ["a", "b"]
maximal_sets = [["a"], ["b"]]
[objective]
kind = "linear"
weights = [3, "0.25"]
"#;
        let inst = parse_instance(text).unwrap();
        assert_eq!(
            inst.objective.value(&[1]).unwrap(),
            ObjectiveValue(rational(1, 4))
        );
        assert_eq!(
            parse_instance(&serialize_instance(&inst).unwrap()).unwrap(),
            inst
        );
    }

    #[test]
    fn empty_system_section_is_a_parse_error() {
        let text = "version = 1\n[system]\n[objective]\nkind = \"linear\"\nweights = []\n";
        assert!(matches!(parse_instance(text), Err(Error::Syntax { .. })));
    }

    #[test]
    fn syntax_error_has_position() {
        let text = "version = 1\n[system\nkind = 1\n";
        match parse_instance(text) {
            Err(Error::Syntax { line, column, .. }) => {
                assert_eq!(line, 2);
                assert!(column >= 1);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unknown_element_is_semantic() {
        let text = fixtures::TWO_BASES_KX.replace(r#"["3", "4"]]"#, r#"["3", "9"]]"#);
        match parse_instance(&text) {
            Err(Error::Semantic(msg)) => assert!(msg.contains("\"9\""), "{msg}"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn k_mismatch_is_semantic() {
        let text = r#"
version = 1
[system]
kind = "set_packing"
k = 1
elements = ["p"]
items = ["u1", "u2"]
sets = [["u1", "u2"]]
[objective]
kind = "linear"
weights = [1]
"#;
        assert!(matches!(parse_instance(text), Err(Error::Semantic(_))));
    }

    #[test]
    fn wrong_version_and_lengths() {
        let text = fixtures::TWO_BASES_KX.replace("version = 1", "version = 2");
        assert!(matches!(parse_instance(&text), Err(Error::Semantic(_))));
        let text = fixtures::TWO_BASES_KX.replace(r#", ["x", "z"]]"#, "]");
        assert!(matches!(parse_instance(&text), Err(Error::Semantic(_))));
    }
}
