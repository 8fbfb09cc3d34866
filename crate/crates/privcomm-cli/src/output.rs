//! Report emission: stable JSON or CSV bytes to stdout or a file, with a
//! finiteness gate for every number that leaves the process.

use std::path::Path;

use serde_json::{json, Value};

use privcomm::model::{DeterministicProtocol, Node, Output};
use privcomm::{Error, Result};

#[derive(Copy, Clone, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// Rejects non-finite values before they can reach a report.
pub fn fin(what: &str, x: f64) -> Result<f64> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(Error::Numerical(format!("{what} is not finite: {x}")))
    }
}

/// Serializes the report in the requested format and writes it to `out` or
/// stdout. JSON is pretty-printed; the CSV rendering comes preassembled.
pub fn emit<T: serde::Serialize>(
    report: &T,
    csv: String,
    format: Format,
    out: Option<&Path>,
) -> Result<()> {
    let bytes = match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(report)
                .map_err(|e| Error::InvalidState(format!("report serialization: {e}")))?;
            s.push('\n');
            s
        }
        Format::Csv => csv,
    };
    match out {
        Some(path) => std::fs::write(path, bytes)
            .map_err(|e| Error::InvalidArgument(format!("{}: {e}", path.display()))),
        None => {
            print!("{bytes}");
            Ok(())
        }
    }
}

/// `key,value` CSV lines for scalar reports.
pub fn kv_csv(rows: &[(String, String)]) -> String {
    let mut s = String::from("key,value\n");
    for (key, value) in rows {
        s.push_str(key);
        s.push(',');
        s.push_str(value);
        s.push('\n');
    }
    s
}

/// Space-joined list rendering for CSV cells.
pub fn join<T: std::fmt::Display>(items: &[T]) -> String {
    items.iter().map(T::to_string).collect::<Vec<_>>().join(" ")
}

/// Nested JSON form of a protocol tree, loadable back through the privacy
/// subcommand.
pub fn tree_json(p: &DeterministicProtocol) -> Value {
    json!({
        "n_x": p.n_x(),
        "n_y": p.n_y(),
        "root": node_json(p.nodes(), p.root()),
    })
}

fn node_json(nodes: &[Node], idx: usize) -> Value {
    match &nodes[idx] {
        Node::Leaf { output } => match output {
            Output::Value(v) => json!({ "output": v }),
            Output::Abort => json!({ "output": "abort" }),
        },
        Node::Speak { owner, bit_cost, message, children } => {
            let kids: serde_json::Map<String, Value> = children
                .iter()
                .map(|(&symbol, &child)| (symbol.to_string(), node_json(nodes, child)))
                .collect();
            json!({
                "owner": owner.to_string(),
                "bits": bit_cost,
                "message_by_input": message,
                "children": kids,
            })
        }
    }
}
