//! JSON network files.
//!
//! ```json
//! {"dimension": 2, "mode": "tangential",
//!  "nodes": [[0.0, 0.0]],
//!  "edges": [{"u": 0, "v": 0, "shift": [1, 0], "weight": 1.0}]}
//! ```

use std::fmt::Write as _;
use std::path::Path;

use reticulate_core::{Anisotropy, Edge, Medium, Network, Point};
use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFile {
    dimension: usize,
    mode: RawMode,
    nodes: Vec<Vec<f64>>,
    edges: Vec<RawEdge>,
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "lowercase")]
enum RawMode {
    Isotropic,
    Tangential,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEdge {
    u: usize,
    v: usize,
    shift: Vec<i64>,
    weight: f64,
}

fn invalid(field: String, message: impl Into<String>) -> CliError {
    CliError::Invalid {
        field,
        message: message.into(),
    }
}

pub fn parse(text: &str) -> Result<Medium, CliError> {
    let raw: RawFile = serde_json::from_str(text).map_err(|e| {
        // serde_json appends the position, which the error already carries.
        let text = e.to_string();
        let message = match text.rsplit_once(" at line ") {
            Some((head, _)) => head.to_string(),
            None => text,
        };
        CliError::Parse {
            line: e.line(),
            column: e.column(),
            message,
        }
    })?;
    let n = raw.dimension;
    if n == 0 {
        return Err(invalid("dimension".into(), "must be at least 1"));
    }
    let mut net = Network::empty(n);
    for (i, x) in raw.nodes.into_iter().enumerate() {
        if x.len() != n {
            return Err(invalid(format!("nodes[{i}]"), format!("expected {n} coordinates, got {}", x.len())));
        }
        if x.iter().any(|c| !c.is_finite()) {
            return Err(invalid(format!("nodes[{i}]"), "coordinates must be finite"));
        }
        net.push_node(Point::new(x))
            .map_err(|e| invalid(format!("nodes[{i}]"), e.to_string()))?;
    }
    for (i, e) in raw.edges.into_iter().enumerate() {
        if !e.weight.is_finite() {
            return Err(invalid(format!("edges[{i}].weight"), "must be finite"));
        }
        net.push_edge(Edge::new(e.u, e.v, e.shift, e.weight))
            .map_err(|err| invalid(format!("edges[{i}]"), err.to_string()))?;
    }
    let mode = match raw.mode {
        RawMode::Isotropic => Anisotropy::Isotropic,
        RawMode::Tangential => Anisotropy::Tangential,
    };
    Ok(Medium::new(net, mode))
}

pub fn read(path: &Path) -> Result<Medium, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse(&text)
}

/// Shortest decimal is not required; 17 significant digits always round-trip.
fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// Canonical serialization: stored order, one node or edge per line.
pub fn write(medium: &Medium) -> String {
    let net = &medium.network;
    let mode = match medium.mode {
        Anisotropy::Isotropic => "isotropic",
        Anisotropy::Tangential => "tangential",
    };
    let mut out = String::new();
    let _ = writeln!(out, "{{");
    let _ = writeln!(out, "  \"dimension\": {},", net.dimension());
    let _ = writeln!(out, "  \"mode\": \"{mode}\",");
    let _ = writeln!(out, "  \"nodes\": [");
    for (i, p) in net.nodes().iter().enumerate() {
        let coords: Vec<String> = p.coords().iter().map(|&x| num(x)).collect();
        let sep = if i + 1 < net.node_count() { "," } else { "" };
        let _ = writeln!(out, "    [{}]{sep}", coords.join(", "));
    }
    let _ = writeln!(out, "  ],");
    let _ = writeln!(out, "  \"edges\": [");
    for (i, e) in net.edges().iter().enumerate() {
        let shift: Vec<String> = e.shift.iter().map(|z| z.to_string()).collect();
        let sep = if i + 1 < net.edge_count() { "," } else { "" };
        let _ = writeln!(
            out,
            "    {{\"u\": {}, \"v\": {}, \"shift\": [{}], \"weight\": {}}}{sep}",
            e.u,
            e.v,
            shift.join(", "),
            num(e.weight)
        );
    }
    let _ = writeln!(out, "  ]");
    let _ = writeln!(out, "}}");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_minimal() {
        let m = parse(
            r#"{"dimension": 2, "mode": "tangential", "nodes": [[0, 0]],
                "edges": [{"u": 0, "v": 0, "shift": [1, 0], "weight": 1}]}"#,
        )
        .unwrap();
        assert_eq!(m.network.edge_count(), 1);
        assert_eq!(m.mode, Anisotropy::Tangential);
    }

    #[test]
    fn errors_are_located() {
        let err = parse("{\"dimension\": 2,\n \"mode\": \"tangential\",\n \"nodes\": [[0, 0]],\n \"edges\": [}").unwrap_err();
        assert!(matches!(err, CliError::Parse { line: 4, .. }), "{err}");

        let err = parse(r#"{"dimension": 2, "mode": "tangential", "nodes": [[0, 0, 0]], "edges": []}"#).unwrap_err();
        assert!(err.to_string().contains("nodes[0]"), "{err}");

        let err = parse(
            r#"{"dimension": 2, "mode": "tangential", "nodes": [[0, 0]],
                "edges": [{"u": 0, "v": 3, "shift": [1, 0], "weight": 1}]}"#,
        )
        .unwrap_err();
        assert!(err.to_string().contains("edges[0]"), "{err}");

        let err = parse(r#"{"dimension": 2, "mode": "weird", "nodes": [], "edges": []}"#).unwrap_err();
        assert!(matches!(err, CliError::Parse { .. }));
    }

    #[test]
    fn round_trip_is_exact() {
        let net = reticulate_core::fixtures::skewed_honeycomb::<f64>();
        let m = Medium::tangential(net);
        let text = write(&m);
        let back = parse(&text).unwrap();
        assert_eq!(back, m);
        assert_eq!(write(&back), text);
    }
}
