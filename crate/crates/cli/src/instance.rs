//! Instance files.
//!
//! ```json
//! {
//!   "group": "Z4xZ3",
//!   "lattice": {"generators": [[2, 0]]},
//!   "omega": [[0, 0], [1, 0]],
//!   "measure": "7/3",
//!   "exact": false
//! }
//! ```
//!
//! `group` may also be a factor list such as `[4, 3]`, `lattice` may be a bare
//! generator list, and on a cyclic group elements may be written as plain
//! integers. `measure` is the Haar weight of a point of `G` (default 1), given
//! as an integer or a `"p/q"` string. Keys `source` and `comment` are ignored.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use serde_json::Value;
use tilespec_core::lattice::Subgroup;
use tilespec_core::{Element, Group, Rational, SetOnGroup, Side};

const KEYS: &[&str] = &[
    "group", "lattice", "omega", "measure", "exact", "source", "comment",
];

/// Input problems, each carrying where in the input it happened.
#[derive(Debug, thiserror::Error)]
pub enum InputError {
    #[error("{origin}: {source}")]
    Io {
        origin: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{origin}:{line}:{column}: {message}")]
    Syntax {
        origin: String,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{origin}: at {location}: {message}")]
    Schema {
        origin: String,
        location: String,
        message: String,
    },
}

/// A parsed and validated instance.
#[derive(Clone, Debug)]
pub struct Instance {
    pub origin: String,
    pub group: Group,
    pub lattice: Option<Subgroup>,
    pub omega: Option<SetOnGroup>,
    pub measure: Rational,
    pub exact: bool,
}

impl Instance {
    pub fn load(path: &Path) -> Result<Instance, InputError> {
        let origin = path.display().to_string();
        let text = std::fs::read_to_string(path).map_err(|source| InputError::Io {
            origin: origin.clone(),
            source,
        })?;
        Instance::parse(&text, &origin)
    }

    pub fn parse(text: &str, origin: &str) -> Result<Instance, InputError> {
        let value: Value = serde_json::from_str(text).map_err(|e| InputError::Syntax {
            origin: origin.to_string(),
            line: e.line(),
            column: e.column(),
            message: strip_position(&e.to_string()),
        })?;
        Parser { origin }.instance(&value)
    }

    pub fn require_lattice(&self) -> Result<&Subgroup, InputError> {
        self.lattice.as_ref().ok_or_else(|| self.missing("lattice"))
    }

    pub fn require_omega(&self) -> Result<&SetOnGroup, InputError> {
        self.omega.as_ref().ok_or_else(|| self.missing("omega"))
    }

    fn missing(&self, key: &str) -> InputError {
        InputError::Schema {
            origin: self.origin.clone(),
            location: "$".into(),
            message: format!("this command needs the {key:?} key"),
        }
    }
}

fn strip_position(msg: &str) -> String {
    match msg.rfind(" at line ") {
        Some(i) => msg[..i].to_string(),
        None => msg.to_string(),
    }
}

struct Parser<'a> {
    origin: &'a str,
}

impl Parser<'_> {
    fn fail<T>(&self, location: &str, message: impl Into<String>) -> Result<T, InputError> {
        Err(InputError::Schema {
            origin: self.origin.to_string(),
            location: location.to_string(),
            message: message.into(),
        })
    }

    fn instance(&self, v: &Value) -> Result<Instance, InputError> {
        let Some(obj) = v.as_object() else {
            return self.fail("$", "an instance must be a JSON object");
        };
        for key in obj.keys() {
            if !KEYS.contains(&key.as_str()) {
                return self.fail(
                    &format!("$.{key}"),
                    format!("unknown key; expected one of {KEYS:?}"),
                );
            }
        }
        let group = match obj.get("group") {
            Some(g) => self.group(g, "$.group")?,
            None => return self.fail("$", "missing required key \"group\""),
        };
        let lattice = match obj.get("lattice") {
            None | Some(Value::Null) => None,
            Some(l) => Some(self.lattice(&group, l)?),
        };
        let omega = match obj.get("omega") {
            None | Some(Value::Null) => None,
            Some(o) => Some(self.set(&group, o, "$.omega")?),
        };
        let measure = match obj.get("measure") {
            None | Some(Value::Null) => Rational::from_integer(1),
            Some(m) => self.rational(m, "$.measure")?,
        };
        let exact = match obj.get("exact") {
            None | Some(Value::Null) => false,
            Some(Value::Bool(b)) => *b,
            Some(_) => return self.fail("$.exact", "expected true or false"),
        };
        Ok(Instance {
            origin: self.origin.to_string(),
            group,
            lattice,
            omega,
            measure,
            exact,
        })
    }

    fn group(&self, v: &Value, at: &str) -> Result<Group, InputError> {
        match v {
            Value::String(s) => Group::from_str(s).or_else(|e| self.fail(at, e.to_string())),
            Value::Array(items) => {
                let mut factors = Vec::with_capacity(items.len());
                for (j, x) in items.iter().enumerate() {
                    match x.as_u64() {
                        Some(n) if n >= 1 => factors.push(n),
                        _ => {
                            return self
                                .fail(&format!("{at}[{j}]"), "factor must be a positive integer")
                        }
                    }
                }
                if factors.is_empty() {
                    return self.fail(at, "factor list is empty; write [1] for the trivial group");
                }
                Group::from_moduli(factors).or_else(|e| self.fail(at, e.to_string()))
            }
            _ => self.fail(
                at,
                "expected a literal like \"Z4xZ3\" or a factor list like [4, 3]",
            ),
        }
    }

    fn lattice(&self, group: &Group, v: &Value) -> Result<Subgroup, InputError> {
        let (gens, at) = match v {
            Value::Object(o) => {
                for key in o.keys() {
                    if key != "generators" {
                        return self.fail(
                            &format!("$.lattice.{key}"),
                            "unknown key; expected \"generators\"",
                        );
                    }
                }
                match o.get("generators") {
                    Some(g) => (g, "$.lattice.generators"),
                    None => return self.fail("$.lattice", "missing key \"generators\""),
                }
            }
            Value::Array(_) => (v, "$.lattice"),
            _ => {
                return self.fail(
                    "$.lattice",
                    "expected {\"generators\": [...]} or a generator list",
                )
            }
        };
        let Some(items) = gens.as_array() else {
            return self.fail(at, "expected a list of elements");
        };
        let mut elements = Vec::with_capacity(items.len());
        for (i, x) in items.iter().enumerate() {
            elements.push(self.element(group, x, &format!("{at}[{i}]"))?);
        }
        Subgroup::new(group, Side::Primal, &elements).or_else(|e| self.fail(at, e.to_string()))
    }

    fn set(&self, group: &Group, v: &Value, at: &str) -> Result<SetOnGroup, InputError> {
        let Some(items) = v.as_array() else {
            return self.fail(at, "expected a list of elements");
        };
        let mut set = SetOnGroup::empty(group);
        for (i, x) in items.iter().enumerate() {
            let here = format!("{at}[{i}]");
            let e = self.element(group, x, &here)?;
            let k = group.index_of(e.coords());
            if set.contains(k) {
                return self.fail(&here, format!("duplicate element {e}"));
            }
            set.insert(k);
        }
        Ok(set)
    }

    fn element(&self, group: &Group, v: &Value, at: &str) -> Result<Element, InputError> {
        let coords: Vec<&Value> = match v {
            Value::Number(_) if group.rank() == 1 => vec![v],
            Value::Array(a) => a.iter().collect(),
            _ => {
                return self.fail(
                    at,
                    format!(
                        "expected an element of {group} as a list of {} integers",
                        group.rank()
                    ),
                )
            }
        };
        if coords.len() != group.rank() {
            return self.fail(
                at,
                format!(
                    "{} coordinates given, {group} has rank {}",
                    coords.len(),
                    group.rank()
                ),
            );
        }
        let mut out = Vec::with_capacity(coords.len());
        for (j, (c, &n)) in coords.iter().zip(group.factors()).enumerate() {
            match c.as_u64() {
                Some(x) if x < n => out.push(x),
                _ => {
                    let here = if matches!(v, Value::Array(_)) {
                        format!("{at}[{j}]")
                    } else {
                        at.to_string()
                    };
                    return self.fail(
                        &here,
                        format!("coordinate {c} out of range for Z{n} (expected 0..{n})"),
                    );
                }
            }
        }
        Ok(Element(out))
    }

    fn rational(&self, v: &Value, at: &str) -> Result<Rational, InputError> {
        let r = match v {
            Value::Number(n) => match n.as_i64() {
                Some(k) => Rational::from_integer(k),
                None => {
                    return self.fail(
                        at,
                        "non-integer numbers are ambiguous; write the weight as \"p/q\"",
                    )
                }
            },
            Value::String(s) => match parse_rational(s) {
                Some(r) => r,
                None => return self.fail(at, format!("cannot read {s:?} as a rational \"p/q\"")),
            },
            _ => return self.fail(at, "expected an integer or a \"p/q\" string"),
        };
        if r <= Rational::from_integer(0) {
            return self.fail(at, "the Haar weight must be positive");
        }
        Ok(r)
    }
}

pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    let (p, q) = match s.split_once('/') {
        Some((p, q)) => (p.trim().parse::<i64>().ok()?, q.trim().parse::<i64>().ok()?),
        None => (s.parse::<i64>().ok()?, 1),
    };
    (q != 0).then(|| Rational::new(p, q))
}

/// Element written on the command line: `3`, `1,0` or `(1,0)`.
pub fn parse_element(group: &Group, text: &str) -> Result<Element, String> {
    let inner = text.trim().trim_start_matches('(').trim_end_matches(')');
    let coords: Vec<&str> = inner.split(',').map(str::trim).collect();
    if coords.len() != group.rank() {
        return Err(format!(
            "element {text:?}: {} coordinates given, {group} has rank {}",
            coords.len(),
            group.rank()
        ));
    }
    let mut out = Vec::with_capacity(coords.len());
    for (c, &n) in coords.iter().zip(group.factors()) {
        match c.parse::<u64>() {
            Ok(x) if x < n => out.push(x),
            _ => {
                return Err(format!(
                    "element {text:?}: coordinate {c:?} out of range for Z{n}"
                ))
            }
        }
    }
    Ok(Element(out))
}

/// JSON form of an element: a bare integer is not used, always a list.
pub fn element_json(e: &Element) -> Value {
    Value::from(e.coords().to_vec())
}

pub fn set_json(set: &SetOnGroup) -> Value {
    Value::Array(set.elements().iter().map(element_json).collect())
}

/// Instance file text for a group, subgroup generators and a set.
pub fn render_instance(
    group: &Group,
    generators: &[Element],
    omega: &SetOnGroup,
    source: Option<Value>,
) -> String {
    let mut doc = serde_json::Map::new();
    doc.insert("group".into(), Value::from(group.factors().to_vec()));
    doc.insert(
        "lattice".into(),
        serde_json::json!({ "generators": generators.iter().map(element_json).collect::<Vec<_>>() }),
    );
    doc.insert("omega".into(), set_json(omega));
    if let Some(s) = source {
        doc.insert("source".into(), s);
    }
    let mut out = serde_json::to_string_pretty(&Value::Object(doc)).expect("JSON values serialize");
    let _ = writeln!(out);
    out
}
