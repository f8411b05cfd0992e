//! `netmodel 1` text serialization of trained networks.
//!
//! ```text
//! netmodel 1
//! <input> <hidden> <output>
//! <key> <value...>          optional metadata lines
//! [layer 0]
//! w00 w01 ...               one line per matrix row, bias row last
//! ...
//! ```
//!
//! Weights are written with 17 significant digits, which reproduces every
//! f64 exactly. Momentum state is not stored.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use crate::error::{format_err, Error, Result};

use super::{Layer, Network, NetworkShape};

const HEADER: &str = "netmodel 1";

/// A network plus the metadata lines stored alongside it.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelFile {
    pub network: Network,
    pub metadata: BTreeMap<String, String>,
}

pub fn write_model<W: Write>(
    net: &Network,
    metadata: &BTreeMap<String, String>,
    mut w: W,
) -> Result<()> {
    writeln!(w, "{HEADER}")?;
    let s = net.shape;
    writeln!(w, "{} {} {}", s.input, s.hidden, s.output)?;
    for (key, value) in metadata {
        writeln!(w, "{key} {value}")?;
    }
    for (l, layer) in net.layers.iter().enumerate() {
        writeln!(w, "[layer {l}]")?;
        for i in 0..layer.rows() {
            let row: Vec<String> = layer.row(i).iter().map(|x| format!("{x:.16e}")).collect();
            writeln!(w, "{}", row.join(" "))?;
        }
    }
    Ok(())
}

pub fn read_model<R: BufRead>(reader: R) -> Result<ModelFile> {
    let mut lines = reader.lines().enumerate().map(|(n, l)| {
        l.map(|l| (n + 1, l.trim_end_matches('\r').to_string()))
            .map_err(Error::from)
    });
    let parse_err = |line: usize, msg: String| Error::Parse { line, msg };

    match lines.next().transpose()? {
        Some((_, l)) if l == HEADER => {}
        Some((_, l)) => return Err(format_err(format!("unsupported model header {l:?}"))),
        None => return Err(format_err("empty model file")),
    }
    let (n, l) = lines
        .next()
        .transpose()?
        .ok_or_else(|| format_err("missing shape line"))?;
    let dims: Vec<usize> = l
        .split_whitespace()
        .map(|x| x.parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| parse_err(n, format!("bad shape line {l:?}: {e}")))?;
    let [input, hidden, output] = dims[..] else {
        return Err(parse_err(
            n,
            format!("shape line needs 3 numbers, got {l:?}"),
        ));
    };
    let shape = NetworkShape::new(input, hidden, output)?;

    let mut metadata = BTreeMap::new();
    let mut layers: Vec<Layer> = Vec::new();
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let dims = shape.layer_dims();
    let finish = |rows: &mut Vec<Vec<f64>>, layers: &mut Vec<Layer>| -> Result<()> {
        let l = layers.len();
        let (i, o) = *dims
            .get(l)
            .ok_or_else(|| format_err(format!("unexpected layer {l}")))?;
        if rows.len() != i + 1 || rows.iter().any(|r| r.len() != o) {
            return Err(format_err(format!(
                "layer {l} must be {} rows of {o} values",
                i + 1
            )));
        }
        let mut layer = Layer::zeros(i, o);
        layer.weights = rows.drain(..).flatten().collect();
        layers.push(layer);
        Ok(())
    };

    let mut in_layer = false;
    for item in lines {
        let (n, l) = item?;
        if l.is_empty() {
            continue;
        }
        if let Some(rest) = l.strip_prefix("[layer ").and_then(|r| r.strip_suffix(']')) {
            if in_layer {
                finish(&mut rows, &mut layers)?;
            }
            if rest.parse::<usize>().ok() != Some(layers.len()) {
                return Err(parse_err(n, format!("expected [layer {}]", layers.len())));
            }
            in_layer = true;
        } else if in_layer {
            let row: Vec<f64> = l
                .split_whitespace()
                .map(str::parse::<f64>)
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| parse_err(n, format!("bad weight: {e}")))?;
            rows.push(row);
        } else {
            let (key, value) = l.split_once(' ').unwrap_or((l.as_str(), ""));
            metadata.insert(key.to_string(), value.to_string());
        }
    }
    if in_layer {
        finish(&mut rows, &mut layers)?;
    }
    if layers.len() != dims.len() {
        return Err(format_err(format!(
            "expected {} weight matrices, found {}",
            dims.len(),
            layers.len()
        )));
    }
    Ok(ModelFile {
        network: Network::from_layers(shape, layers),
        metadata,
    })
}
