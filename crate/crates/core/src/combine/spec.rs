//! Decomposition trees: parsing, evaluation and derivation traces.
//!
//! A node is a JSON object with a `rule` field:
//!
//! ```text
//! leaf             value, provenance?, note?
//! cell_sum         cells: [{dim, node}]
//! graph_of_groups  vertices: [node], edges: [node]
//! amalgam          factors: [node, node], edge: node
//! product          chi (rational) | orbifold: [{dim, order}], child
//! restriction      index, child
//! finite_quotient  order, child
//! power            n, child
//! surface          volumes: [real]
//! jsj              flexible: [node], rigid?: [label]
//! ```
//!
//! Numbers in `value` and `chi` may be JSON numbers or strings such as
//! `"-1/6"`; decimals are read exactly. `order: "inf"` marks an infinite
//! stabilizer.

use serde::Serialize;
use serde_json::{Map, Value};

use crate::combine::rules::{
    cell_sum, graph_of_groups, jsj_auto, orbifold_euler, scale, surface_auto, OrbitCell, Scaling,
};
use crate::combine::value::{parse_rational, rational_string, TorsionValue};
use crate::error::{Error, Result};
use crate::provenance::Provenance;
use num_rational::BigRational;

#[derive(Clone, Debug, PartialEq)]
pub enum Node {
    Leaf(TorsionValue),
    CellSum(Vec<(usize, Node)>),
    GraphOfGroups { vertices: Vec<Node>, edges: Vec<Node> },
    Amalgam { factors: Box<[Node; 2]>, edge: Box<Node> },
    Scale { mode: Scaling, child: Box<Node> },
    Surface(Vec<f64>),
    Jsj { flexible: Vec<Node>, rigid: Vec<String> },
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecompositionSpec {
    pub root: Node,
}

/// One applied rule, listed bottom-up.
#[derive(Clone, Debug, Serialize)]
pub struct TraceStep {
    pub path: String,
    pub depth: usize,
    pub rule: &'static str,
    pub formula: String,
    pub result: TorsionValue,
}

#[derive(Clone, Debug, Serialize)]
pub struct Evaluation {
    pub value: TorsionValue,
    pub trace: Vec<TraceStep>,
}

fn err(path: &str, message: impl Into<String>) -> Error {
    Error::Decomposition {
        path: path.to_string(),
        message: message.into(),
    }
}

fn obj<'a>(v: &'a Value, path: &str) -> Result<&'a Map<String, Value>> {
    v.as_object().ok_or_else(|| err(path, "expected an object"))
}

fn field<'a>(o: &'a Map<String, Value>, key: &str, path: &str) -> Result<&'a Value> {
    o.get(key).ok_or_else(|| err(path, format!("missing field `{key}`")))
}

fn array<'a>(o: &'a Map<String, Value>, key: &str, path: &str) -> Result<&'a Vec<Value>> {
    field(o, key, path)?
        .as_array()
        .ok_or_else(|| err(path, format!("`{key}` must be an array")))
}

fn rational(v: &Value, path: &str, what: &str) -> Result<BigRational> {
    let parsed = match v {
        Value::Number(n) => parse_rational(&n.to_string()),
        Value::String(s) => parse_rational(s),
        _ => None,
    };
    parsed.ok_or_else(|| err(path, format!("`{what}` must be a rational number")))
}

fn positive(o: &Map<String, Value>, key: &str, path: &str) -> Result<u64> {
    match field(o, key, path)?.as_u64() {
        Some(n) if n > 0 => Ok(n),
        _ => Err(err(path, format!("`{key}` must be a positive integer"))),
    }
}

fn single_child(o: &Map<String, Value>, path: &str) -> Result<Box<Node>> {
    let c = field(o, "child", path)?;
    Ok(Box::new(parse_node(c, &format!("{path}.child"))?))
}

fn node_list(o: &Map<String, Value>, key: &str, path: &str) -> Result<Vec<Node>> {
    array(o, key, path)?
        .iter()
        .enumerate()
        .map(|(i, c)| parse_node(c, &format!("{path}.{key}[{i}]")))
        .collect()
}

fn parse_node(v: &Value, path: &str) -> Result<Node> {
    let o = obj(v, path)?;
    let rule = field(o, "rule", path)?
        .as_str()
        .ok_or_else(|| err(path, "`rule` must be a string"))?;
    match rule {
        "leaf" => {
            let provenance = match o.get("provenance") {
                None => Provenance::Asserted,
                Some(p) => p
                    .as_str()
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| err(path, "unknown provenance"))?,
            };
            let raw = field(o, "value", path)?;
            let value = match provenance {
                Provenance::Asserted | Provenance::ClosedForm => {
                    TorsionValue::rational(rational(raw, path, "value")?, provenance)?
                }
                _ => {
                    let x = raw
                        .as_f64()
                        .ok_or_else(|| err(path, "`value` must be a number"))?;
                    TorsionValue::computed(x, provenance)
                }
            };
            let note = o.get("note").and_then(Value::as_str).unwrap_or_default();
            Ok(Node::Leaf(value.with_note(note)))
        }
        "cell_sum" => {
            let cells = array(o, "cells", path)?;
            if cells.is_empty() {
                return Err(err(path, "cell_sum needs at least one cell"));
            }
            let mut out = Vec::with_capacity(cells.len());
            for (i, c) in cells.iter().enumerate() {
                let p = format!("{path}.cells[{i}]");
                let co = obj(c, &p)?;
                let dim = field(co, "dim", &p)?
                    .as_u64()
                    .ok_or_else(|| err(&p, "`dim` must be a nonnegative integer"))?;
                out.push((dim as usize, parse_node(field(co, "node", &p)?, &format!("{p}.node"))?));
            }
            Ok(Node::CellSum(out))
        }
        "graph_of_groups" => {
            let vertices = node_list(o, "vertices", path)?;
            if vertices.is_empty() {
                return Err(err(path, "graph_of_groups needs at least one vertex"));
            }
            let edges = match o.get("edges") {
                Some(_) => node_list(o, "edges", path)?,
                None => Vec::new(),
            };
            Ok(Node::GraphOfGroups { vertices, edges })
        }
        "amalgam" => {
            let factors = node_list(o, "factors", path)?;
            let Ok(factors) = <[Node; 2]>::try_from(factors) else {
                return Err(err(path, "amalgam needs exactly two factors"));
            };
            let edge = parse_node(field(o, "edge", path)?, &format!("{path}.edge"))?;
            Ok(Node::Amalgam {
                factors: Box::new(factors),
                edge: Box::new(edge),
            })
        }
        "product" => {
            let chi = match (o.get("chi"), o.get("orbifold")) {
                (Some(c), None) => rational(c, path, "chi")?,
                (None, Some(cells)) => {
                    let cells = cells
                        .as_array()
                        .ok_or_else(|| err(path, "`orbifold` must be an array"))?;
                    let parsed = cells
                        .iter()
                        .enumerate()
                        .map(|(i, c)| parse_orbit_cell(c, &format!("{path}.orbifold[{i}]")))
                        .collect::<Result<Vec<_>>>()?;
                    orbifold_euler(&parsed).map_err(|e| err(path, e.to_string()))?
                }
                _ => return Err(err(path, "product needs exactly one of `chi` or `orbifold`")),
            };
            Ok(Node::Scale {
                mode: Scaling::Product(chi),
                child: single_child(o, path)?,
            })
        }
        "restriction" => Ok(Node::Scale {
            mode: Scaling::Restriction(positive(o, "index", path)?),
            child: single_child(o, path)?,
        }),
        "finite_quotient" => Ok(Node::Scale {
            mode: Scaling::FiniteQuotient(positive(o, "order", path)?),
            child: single_child(o, path)?,
        }),
        "power" => Ok(Node::Scale {
            mode: Scaling::Power(positive(o, "n", path)?),
            child: single_child(o, path)?,
        }),
        "surface" => {
            let vols = array(o, "volumes", path)?
                .iter()
                .map(|v| v.as_f64().ok_or_else(|| err(path, "volumes must be numbers")))
                .collect::<Result<Vec<_>>>()?;
            if let Some(v) = vols.iter().find(|&&v| v < 0.0) {
                return Err(err(path, format!("negative volume {v}")));
            }
            Ok(Node::Surface(vols))
        }
        "jsj" => {
            let flexible = node_list(o, "flexible", path)?;
            let rigid = match o.get("rigid") {
                None => Vec::new(),
                Some(r) => r
                    .as_array()
                    .ok_or_else(|| err(path, "`rigid` must be an array of labels"))?
                    .iter()
                    .map(|x| {
                        x.as_str()
                            .map(str::to_string)
                            .ok_or_else(|| err(path, "rigid vertex labels must be strings"))
                    })
                    .collect::<Result<Vec<_>>>()?,
            };
            Ok(Node::Jsj { flexible, rigid })
        }
        "composition" => Err(err(
            path,
            "there is no composition rule: ρ of a composite is not the sum of the parts",
        )),
        other => Err(err(path, format!("unknown rule `{other}`"))),
    }
}

fn parse_orbit_cell(v: &Value, path: &str) -> Result<OrbitCell> {
    let o = obj(v, path)?;
    let dim = field(o, "dim", path)?
        .as_u64()
        .ok_or_else(|| err(path, "`dim` must be a nonnegative integer"))? as usize;
    let order = match field(o, "order", path)? {
        Value::String(s) if s == "inf" => None,
        x => Some(
            x.as_u64()
                .filter(|&n| n >= 1)
                .ok_or_else(|| err(path, "`order` must be a positive integer or \"inf\""))?,
        ),
    };
    Ok(OrbitCell { dim, order })
}

impl DecompositionSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(text)?;
        Self::from_value(&v)
    }

    pub fn from_value(v: &Value) -> Result<Self> {
        Ok(DecompositionSpec {
            root: parse_node(v, "root")?,
        })
    }

    pub fn evaluate(&self) -> Result<Evaluation> {
        let mut trace = Vec::new();
        let value = eval(&self.root, "root", 0, &mut trace)?;
        Ok(Evaluation { value, trace })
    }
}

fn eval(node: &Node, path: &str, depth: usize, trace: &mut Vec<TraceStep>) -> Result<TorsionValue> {
    let sub = |n: &Node, p: String, trace: &mut Vec<TraceStep>| eval(n, &p, depth + 1, trace);
    let (rule, formula, result) = match node {
        Node::Leaf(v) => ("leaf", "input value".to_string(), v.clone()),
        Node::CellSum(cells) => {
            let mut vals = Vec::with_capacity(cells.len());
            for (i, (d, n)) in cells.iter().enumerate() {
                vals.push((*d, sub(n, format!("{path}.cells[{i}].node"), trace)?));
            }
            (
                "cell_sum",
                "cell-sum formula: Σ over equivariant cells of (−1)^dim · ρ(stabilizer)".to_string(),
                cell_sum(&vals),
            )
        }
        Node::GraphOfGroups { vertices, edges } => {
            let mut vs = Vec::new();
            for (i, n) in vertices.iter().enumerate() {
                vs.push(sub(n, format!("{path}.vertices[{i}]"), trace)?);
            }
            let mut es = Vec::new();
            for (i, n) in edges.iter().enumerate() {
                es.push(sub(n, format!("{path}.edges[{i}]"), trace)?);
            }
            (
                "graph_of_groups",
                "graph-of-groups formula: Σ vertex groups − Σ edge groups".to_string(),
                graph_of_groups(&vs, &es),
            )
        }
        Node::Amalgam { factors, edge } => {
            let a = sub(&factors[0], format!("{path}.factors[0]"), trace)?;
            let b = sub(&factors[1], format!("{path}.factors[1]"), trace)?;
            let c = sub(edge, format!("{path}.edge"), trace)?;
            (
                "amalgam",
                "amalgamated product formula: ρ(G₁) + ρ(G₂) − ρ(G₀)".to_string(),
                crate::combine::rules::amalgam(&a, &b, &c),
            )
        }
        Node::Scale { mode, child } => {
            let v = sub(child, format!("{path}.child"), trace)?;
            let (rule, formula) = match mode {
                Scaling::Product(chi) => (
                    "product",
                    format!(
                        "product formula: χ⁽²⁾ · ρ with χ⁽²⁾ = {}",
                        rational_string(chi)
                    ),
                ),
                Scaling::Restriction(n) => (
                    "restriction",
                    format!("restriction to a subgroup of index {n}: index · ρ"),
                ),
                Scaling::FiniteQuotient(k) => (
                    "finite_quotient",
                    format!("quotient by a finite normal subgroup of order {k}: ρ / order"),
                ),
                Scaling::Power(n) => (
                    "power",
                    format!("multiplicativity under powers: ρ(Φ^{n}) = {n} · ρ(Φ)"),
                ),
            };
            (rule, formula, scale(mode, &v).map_err(|e| err(path, e.to_string()))?)
        }
        Node::Surface(vols) => (
            "surface",
            format!(
                "surface automorphism formula: −(1/6π) · Σ volumes over {} hyperbolic piece(s)",
                vols.len()
            ),
            surface_auto(vols).map_err(|e| err(path, e.to_string()))?,
        ),
        Node::Jsj { flexible, rigid } => {
            let mut fs = Vec::new();
            for (i, n) in flexible.iter().enumerate() {
                fs.push(sub(n, format!("{path}.flexible[{i}]"), trace)?);
            }
            let mut formula = "JSJ formula: Σ over flexible vertices".to_string();
            if !rigid.is_empty() {
                formula.push_str(&format!(
                    "; rigid/polycyclic vertices {} contribute 0",
                    rigid.join(", ")
                ));
            }
            ("jsj", formula, jsj_auto(&fs))
        }
    };
    trace.push(TraceStep {
        path: path.to_string(),
        depth,
        rule,
        formula,
        result: result.clone(),
    });
    Ok(result)
}

impl Evaluation {
    /// Indented derivation, parents above children.
    pub fn trace_text(&self) -> String {
        let mut steps: Vec<&TraceStep> = self.trace.iter().collect();
        // Children precede parents in the trace; present top-down by
        // reversing the post-order while keeping sibling order.
        steps.sort_by(|a, b| a.path.cmp(&b.path));
        let mut out = String::new();
        for s in steps {
            out.push_str(&"  ".repeat(s.depth));
            out.push_str(&format!("{} = {}    ({}; {})\n", s.path, s.result, s.rule, s.formula));
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn eval_str(s: &str) -> Result<Evaluation> {
        DecompositionSpec::from_json(s)?.evaluate()
    }

    #[test]
    fn leaf() {
        let e = eval_str(r#"{"rule":"leaf","value":-1}"#).unwrap();
        assert_eq!(e.value.exact(), Some(&BigRational::from_integer(BigInt::from(-1))));
        assert_eq!(e.trace.len(), 1);
    }

    #[test]
    fn finite_quotient_of_amalgam() {
        let e = eval_str(
            r#"{"rule":"finite_quotient","order":2,"child":{"rule":"amalgam",
                "factors":[{"rule":"leaf","value":-1},{"rule":"leaf","value":-2}],
                "edge":{"rule":"leaf","value":0}}}"#,
        )
        .unwrap();
        assert_eq!(e.value.exact().unwrap(), &BigRational::new((-3).into(), 2.into()));
        assert_eq!(e.value.value(), -1.5);
        assert!(e.trace_text().contains("amalgamated product formula"));
    }

    #[test]
    fn arity_errors_carry_paths() {
        let e = eval_str(
            r#"{"rule":"power","n":2,"child":{"rule":"amalgam",
                "factors":[{"rule":"leaf","value":-1}],"edge":{"rule":"leaf","value":0}}}"#,
        )
        .unwrap_err();
        match e {
            Error::Decomposition { path, .. } => assert_eq!(path, "root.child"),
            other => panic!("{other}"),
        }
        let e = eval_str(r#"{"rule":"cell_sum","cells":[{"dim":0}]}"#).unwrap_err();
        assert!(e.to_string().contains("root.cells[0]"));
        let e = eval_str(r#"{"rule":"restriction","index":0,"child":{"rule":"leaf","value":1}}"#).unwrap_err();
        assert!(e.to_string().contains("positive"));
    }

    #[test]
    fn composition_is_refused() {
        assert!(eval_str(r#"{"rule":"composition"}"#).is_err());
    }

    #[test]
    fn product_from_orbifold_cells() {
        let e = eval_str(
            r#"{"rule":"product","orbifold":[{"dim":0,"order":2},{"dim":0,"order":3},{"dim":1,"order":1}],
                "child":{"rule":"leaf","value":"6"}}"#,
        )
        .unwrap();
        assert_eq!(e.value.exact().unwrap(), &BigRational::from_integer((-1).into()));
        let e = eval_str(
            r#"{"rule":"product","orbifold":[{"dim":0,"order":"inf"}],"child":{"rule":"leaf","value":1}}"#,
        );
        assert!(e.is_err());
    }

    #[test]
    fn jsj_with_surfaces() {
        let e = eval_str(
            r#"{"rule":"jsj","rigid":["R1"],"flexible":[{"rule":"surface","volumes":[2.0298832]},
                {"rule":"surface","volumes":[0.9159655]}]}"#,
        )
        .unwrap();
        let expected = -(2.0298832 + 0.9159655) / (6.0 * std::f64::consts::PI);
        assert!((e.value.value() - expected).abs() < 1e-15);
        assert_eq!(e.value.provenance, Provenance::ClosedForm);
        assert!(e.trace_text().contains("R1"));
    }

    #[test]
    fn approximated_leaf_taints() {
        let e = eval_str(
            r#"{"rule":"graph_of_groups","vertices":[{"rule":"leaf","value":0.25,"provenance":"approximated"},
                {"rule":"leaf","value":"1/4"}]}"#,
        )
        .unwrap();
        assert_eq!(e.value.provenance, Provenance::Approximated);
        assert!(e.value.exact().is_none());
        assert_eq!(e.value.value(), 0.5);
    }

    #[test]
    fn evaluation_is_deterministic() {
        let s = r#"{"rule":"power","n":3,"child":{"rule":"cell_sum","cells":[
            {"dim":0,"node":{"rule":"surface","volumes":[1.5,2.25]}},
            {"dim":1,"node":{"rule":"leaf","value":"-2/7"}}]}}"#;
        assert_eq!(eval_str(s).unwrap().to_json(), eval_str(s).unwrap().to_json());
    }
}
