//! JSON documents for instances and solutions.

use serde::{Deserialize, Serialize};

use crate::classify::CaterpillarCertificate;
use crate::error::{DsnError, Result};
use crate::graph::{Cost, Pattern, SolutionNetwork, WeightedDigraph};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphDocument {
    pub vertices: Vec<String>,
    pub edges: Vec<(String, String, Cost)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PatternDocument {
    pub terminals: Vec<String>,
    pub demands: Vec<(String, String)>,
}

impl PatternDocument {
    pub fn from_pattern(h: &Pattern) -> Self {
        PatternDocument {
            terminals: h.terminals().iter().chain(h.stripped()).cloned().collect(),
            demands: h.demand_names(),
        }
    }

    pub fn to_pattern(&self) -> Result<Pattern> {
        Pattern::new(self.terminals.iter().cloned(), self.demands.iter().cloned())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceDocument {
    pub graph: GraphDocument,
    pub pattern: PatternDocument,
}

impl InstanceDocument {
    pub fn from_instance(g: &WeightedDigraph, h: &Pattern) -> Self {
        InstanceDocument {
            graph: GraphDocument {
                vertices: g.names().to_vec(),
                edges: g
                    .edges()
                    .iter()
                    .map(|e| (g.name(e.tail).to_string(), g.name(e.head).to_string(), e.cost))
                    .collect(),
            },
            pattern: PatternDocument::from_pattern(h),
        }
    }

    pub fn to_instance(&self) -> Result<(WeightedDigraph, Pattern)> {
        let g = WeightedDigraph::new(self.graph.vertices.iter().cloned(), self.graph.edges.iter().cloned())?;
        let h = self.pattern.to_pattern()?;
        h.bind(&g)?;
        Ok((g, h))
    }
}

/// A set of host edges; `cost`, when present, is checked against the host.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolutionDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cost: Option<Cost>,
    pub edges: Vec<(String, String)>,
}

impl SolutionDocument {
    pub fn from_network(n: &SolutionNetwork<'_>) -> Self {
        SolutionDocument {
            cost: Some(n.cost()),
            edges: n.named_edges().into_iter().map(|(a, b, _)| (a, b)).collect(),
        }
    }

    pub fn to_network<'g>(&self, g: &'g WeightedDigraph) -> Result<SolutionNetwork<'g>> {
        let n = SolutionNetwork::from_named_edges(g, self.edges.iter().map(|(a, b)| (a.as_str(), b.as_str())))?;
        if let Some(c) = self.cost {
            if c != n.cost() {
                return Err(DsnError::InvalidArgument(format!(
                    "solution claims cost {c} but its edges cost {}",
                    n.cost()
                )));
            }
        }
        Ok(n)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificateDocument {
    pub lambda0: usize,
    pub orientation: String,
    pub spine: Vec<String>,
    pub stars: Vec<Vec<String>>,
    pub extra_edges: Vec<(String, String)>,
    pub equivalent_pattern: Option<PatternDocument>,
}

impl CertificateDocument {
    pub fn from_certificate(c: &CaterpillarCertificate) -> Self {
        CertificateDocument {
            lambda0: c.lambda0,
            orientation: c.orientation.as_str().to_string(),
            spine: c.spine.clone(),
            stars: c.stars.clone(),
            extra_edges: c.extra_edges.clone(),
            equivalent_pattern: c.equivalent_pattern.as_ref().map(PatternDocument::from_pattern),
        }
    }
}

fn parse_error(what: &str, e: serde_json::Error) -> DsnError {
    DsnError::Parse(format!("{what}: {e}"))
}

pub fn parse_instance(text: &str) -> Result<InstanceDocument> {
    let doc: InstanceDocument = serde_json::from_str(text).map_err(|e| parse_error("instance", e))?;
    doc.to_instance()?;
    Ok(doc)
}

pub fn parse_solution(text: &str) -> Result<SolutionDocument> {
    serde_json::from_str(text).map_err(|e| parse_error("solution", e))
}

/// Compact JSON with fields in declaration order.
pub fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("documents always serialize")
}

#[cfg(test)]
mod tests {
    use super::*;

    const PATH: &str = r#"{"graph":{"vertices":["s","a","t"],"edges":[["s","a",1],["a","t",1]]},"pattern":{"terminals":["s","t"],"demands":[["s","t"]]}}"#;

    #[test]
    fn round_trip() {
        let doc = parse_instance(PATH).unwrap();
        assert_eq!(to_json(&doc), PATH);
        let (g, h) = doc.to_instance().unwrap();
        assert_eq!(InstanceDocument::from_instance(&g, &h), doc);
        // Key order in the input does not matter.
        let shuffled = r#"{"pattern":{"demands":[["s","t"]],"terminals":["s","t"]},"graph":{"edges":[["s","a",1],["a","t",1]],"vertices":["s","a","t"]}}"#;
        assert_eq!(to_json(&parse_instance(shuffled).unwrap()), PATH);
    }

    #[test]
    fn rejections() {
        let dup = PATH.replace(r#"["s","a","t"]"#, r#"["s","a","s"]"#);
        let err = parse_instance(&dup).unwrap_err();
        assert!(matches!(&err, DsnError::DuplicateVertex(v) if v == "s"));
        let neg = PATH.replace(r#"["s","a",1]"#, r#"["s","a",-1]"#);
        assert!(matches!(parse_instance(&neg), Err(DsnError::Parse(_))));
        let extra = PATH.replace(r#""pattern":{"#, r#""pattern":{"weight":3,"#);
        let err = parse_instance(&extra).unwrap_err();
        assert!(err.to_string().contains("weight"), "{err}");
        assert_eq!(err.exit_code(), 2);
        let unknown = PATH.replace(r#"["s","t"]]"#, r#"["s","q"]]"#);
        assert!(parse_instance(&unknown).is_err());
    }

    #[test]
    fn solutions() {
        let (g, _) = parse_instance(PATH).unwrap().to_instance().unwrap();
        let s = parse_solution(r#"{"cost":2,"edges":[["s","a"],["a","t"]]}"#).unwrap();
        assert_eq!(s.to_network(&g).unwrap().cost(), 2);
        let wrong = parse_solution(r#"{"cost":3,"edges":[["s","a"],["a","t"]]}"#).unwrap();
        assert!(wrong.to_network(&g).is_err());
        let n = parse_solution(r#"{"edges":[["s","a"]]}"#)
            .unwrap()
            .to_network(&g)
            .unwrap();
        assert_eq!(
            to_json(&SolutionDocument::from_network(&n)),
            r#"{"cost":1,"edges":[["s","a"]]}"#
        );
        assert!(parse_solution(r#"{"edges":[],"omega":1}"#).is_err());
    }
}
