// SPDX-License-Identifier: Apache-2.0

//! CSV ingestion and export.
//!
//! * nodes: `id,label,lat,lon[,attr...]`; `lat`/`lon` may both be blank.
//! * edges: `source,target,distance_km[,time_<epoch>_min...]`; a blank time
//!   cell means the edge has no travel time in that epoch.
//! * variables: `id,<name>:<tag>...` with tags `S`, `B`, `O`, `Y` or
//!   `<class>:Y`; blank or `NA` cells are missing values.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::empirical::{ColumnTag, VarClass, VariableTable};
use crate::error::{Error, Result};
use crate::graph::{EdgeRecord, NodeRecord, SpatialGraph};

const NODE_HEADER: [&str; 4] = ["id", "label", "lat", "lon"];
const EDGE_HEADER: [&str; 3] = ["source", "target", "distance_km"];

/// Counts reported after a successful ingest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IngestSummary {
    pub nodes: usize,
    pub edges: usize,
    pub components: usize,
    pub epochs: Vec<String>,
    pub variable_rows: Option<usize>,
    pub dropped_variable_rows: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct Ingested {
    pub graph: SpatialGraph,
    pub variables: Option<VariableTable>,
    pub summary: IngestSummary,
}

/// Reads the graph files and, when given, the variables file.
pub fn ingest(nodes: &Path, edges: &Path, variables: Option<&Path>) -> Result<Ingested> {
    let graph = read_graph(nodes, edges)?;
    let variables = variables.map(read_variables).transpose()?;
    let summary = IngestSummary {
        nodes: graph.node_count(),
        edges: graph.edge_count(),
        components: graph.component_count(),
        epochs: graph.epochs().iter().cloned().collect(),
        variable_rows: variables.as_ref().map(VariableTable::rows),
        dropped_variable_rows: variables
            .as_ref()
            .map(|t| t.dropped_ids().to_vec())
            .unwrap_or_default(),
    };
    Ok(Ingested {
        graph,
        variables,
        summary,
    })
}

pub fn read_graph(nodes: &Path, edges: &Path) -> Result<SpatialGraph> {
    let node_records = parse_nodes(open(nodes)?, &display(nodes))?;
    let edge_records = parse_edges(open(edges)?, &display(edges))?;
    SpatialGraph::build(node_records, edge_records)
}

pub fn read_variables(path: &Path) -> Result<VariableTable> {
    parse_variables(open(path)?, &display(path))
}

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn display(path: &Path) -> String {
    path.display().to_string()
}

struct Rows<R: Read> {
    reader: csv::Reader<R>,
    file: String,
}

impl<R: Read> Rows<R> {
    fn new(source: R, file: &str) -> Self {
        let reader = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .flexible(false)
            .from_reader(source);
        Self {
            reader,
            file: file.to_string(),
        }
    }

    fn schema(&self, line: u64, message: impl Into<String>) -> Error {
        Error::Schema {
            file: self.file.clone(),
            line,
            message: message.into(),
        }
    }

    fn header(&mut self) -> Result<Vec<String>> {
        let file = &self.file;
        let header = self.reader.headers().map_err(|e| csv_error(file, e))?;
        Ok(header.iter().map(str::to_string).collect())
    }

    /// Data rows paired with their 1-based line numbers.
    fn records(&mut self) -> Result<Vec<(u64, csv::StringRecord)>> {
        let mut out = Vec::new();
        for record in self.reader.records() {
            let record = record.map_err(|e| csv_error(&self.file, e))?;
            let line = record.position().map_or(0, |p| p.line());
            out.push((line, record));
        }
        Ok(out)
    }
}

fn csv_error(file: &str, e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line());
    Error::Schema {
        file: file.to_string(),
        line,
        message: e.to_string(),
    }
}

fn parse_number<R: Read>(rows: &Rows<R>, line: u64, column: &str, cell: &str) -> Result<f64> {
    cell.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| {
            rows.schema(
                line,
                format!("column `{column}`: `{cell}` is not a finite number"),
            )
        })
}

fn optional_number<R: Read>(
    rows: &Rows<R>,
    line: u64,
    column: &str,
    cell: &str,
) -> Result<Option<f64>> {
    if cell.is_empty() || cell.eq_ignore_ascii_case("na") {
        Ok(None)
    } else {
        parse_number(rows, line, column, cell).map(Some)
    }
}

fn expect_prefix<R: Read>(rows: &Rows<R>, header: &[String], expected: &[&str]) -> Result<()> {
    let found: Vec<&str> = header
        .iter()
        .take(expected.len())
        .map(String::as_str)
        .collect();
    if found != expected {
        return Err(rows.schema(
            1,
            format!(
                "header must start with `{}`, found `{}`",
                expected.join(","),
                found.join(",")
            ),
        ));
    }
    Ok(())
}

pub fn parse_nodes<R: Read>(source: R, file: &str) -> Result<Vec<NodeRecord>> {
    let mut rows = Rows::new(source, file);
    let header = rows.header()?;
    expect_prefix(&rows, &header, &NODE_HEADER)?;
    let attributes = &header[NODE_HEADER.len()..];
    let mut nodes = Vec::new();
    for (line, record) in rows.records()? {
        let id = &record[0];
        if id.is_empty() {
            return Err(rows.schema(line, "empty node id"));
        }
        let mut node = NodeRecord::new(id).with_label(&record[1]);
        match (
            optional_number(&rows, line, "lat", &record[2])?,
            optional_number(&rows, line, "lon", &record[3])?,
        ) {
            (Some(lat), Some(lon)) => node = node.with_position(lat, lon),
            (None, None) => {}
            _ => return Err(rows.schema(line, "lat and lon must be given together")),
        }
        for (name, cell) in attributes.iter().zip(record.iter().skip(NODE_HEADER.len())) {
            if let Some(value) = optional_number(&rows, line, name, cell)? {
                node = node.with_attribute(name.clone(), value);
            }
        }
        nodes.push(node);
    }
    Ok(nodes)
}

fn epoch_of(column: &str) -> Option<&str> {
    column
        .strip_prefix("time_")?
        .strip_suffix("_min")
        .filter(|epoch| !epoch.is_empty())
}

pub fn parse_edges<R: Read>(source: R, file: &str) -> Result<Vec<EdgeRecord>> {
    let mut rows = Rows::new(source, file);
    let header = rows.header()?;
    expect_prefix(&rows, &header, &EDGE_HEADER)?;
    let mut epochs = Vec::new();
    for column in &header[EDGE_HEADER.len()..] {
        let epoch = epoch_of(column).ok_or_else(|| {
            rows.schema(
                1,
                format!("unexpected edge column `{column}`; expected time_<epoch>_min"),
            )
        })?;
        epochs.push(epoch.to_string());
    }
    let mut edges = Vec::new();
    for (line, record) in rows.records()? {
        let km = parse_number(&rows, line, "distance_km", &record[2])?;
        if km < 0.0 {
            return Err(Error::NegativeWeight {
                file: file.to_string(),
                line,
                value: km,
            });
        }
        let mut edge = EdgeRecord::new(&record[0], &record[1], km);
        for (epoch, cell) in epochs.iter().zip(record.iter().skip(EDGE_HEADER.len())) {
            let column = format!("time_{epoch}_min");
            if let Some(minutes) = optional_number(&rows, line, &column, cell)? {
                if minutes < 0.0 {
                    return Err(Error::NegativeWeight {
                        file: file.to_string(),
                        line,
                        value: minutes,
                    });
                }
                edge = edge.with_time(epoch.clone(), minutes);
            }
        }
        edges.push(edge);
    }
    Ok(edges)
}

fn parse_tag(text: &str) -> Option<ColumnTag> {
    match text.split_once(':') {
        None if text == "Y" => Some(ColumnTag::Y),
        None => VarClass::parse(text).map(|class| match class {
            VarClass::S => ColumnTag::S,
            VarClass::B => ColumnTag::B,
            VarClass::O => ColumnTag::O,
        }),
        Some((class, "Y")) => VarClass::parse(class).map(ColumnTag::ClassedY),
        Some(_) => None,
    }
}

pub fn parse_variables<R: Read>(source: R, file: &str) -> Result<VariableTable> {
    let mut rows = Rows::new(source, file);
    let header = rows.header()?;
    if header.first().map(String::as_str) != Some("id") {
        return Err(rows.schema(1, "first column must be `id`"));
    }
    let mut specs = Vec::new();
    for column in &header[1..] {
        let (name, tag) = column
            .split_once(':')
            .and_then(|(name, tag)| Some((name, parse_tag(tag)?)))
            .filter(|(name, _)| !name.is_empty())
            .ok_or_else(|| {
                rows.schema(
                    1,
                    format!("column `{column}` needs a tag: <name>:S|B|O|Y|<class>:Y"),
                )
            })?;
        specs.push((name.to_string(), tag));
    }
    let mut ids = Vec::new();
    let mut values: Vec<Vec<Option<f64>>> = vec![Vec::new(); specs.len()];
    for (line, record) in rows.records()? {
        ids.push(record[0].to_string());
        for (i, (name, _)) in specs.iter().enumerate() {
            values[i].push(optional_number(&rows, line, name, &record[i + 1])?);
        }
    }
    let columns = specs
        .into_iter()
        .zip(values)
        .map(|((name, tag), v)| (name, tag, v))
        .collect();
    VariableTable::new(ids, columns).map_err(|e| match e {
        Error::Config(message) => rows.schema(1, message),
        other => other,
    })
}

/// Node and edge CSVs that `parse_nodes`/`parse_edges` read back into the same graph.
pub fn export_graph(
    g: &SpatialGraph,
    nodes: &mut impl Write,
    edges: &mut impl Write,
) -> Result<()> {
    let attributes: Vec<String> = {
        let mut names: Vec<String> = g
            .nodes()
            .iter()
            .flat_map(|n| n.attributes.keys().cloned())
            .collect();
        names.sort();
        names.dedup();
        names
    };
    let mut w = csv::Writer::from_writer(nodes);
    let header: Vec<String> = NODE_HEADER
        .iter()
        .map(|s| s.to_string())
        .chain(attributes.iter().cloned())
        .collect();
    w.write_record(&header).map_err(io_error)?;
    for node in g.nodes() {
        let (lat, lon) = node.position.map_or((String::new(), String::new()), |p| {
            (p.lat.to_string(), p.lon.to_string())
        });
        let mut row = vec![node.id.clone(), node.label.clone(), lat, lon];
        row.extend(
            attributes
                .iter()
                .map(|a| node.attributes.get(a).map_or(String::new(), f64::to_string)),
        );
        w.write_record(&row).map_err(io_error)?;
    }
    w.flush()?;

    let epochs: Vec<&String> = g.epochs().iter().collect();
    let mut w = csv::Writer::from_writer(edges);
    let header: Vec<String> = EDGE_HEADER
        .iter()
        .map(|s| s.to_string())
        .chain(epochs.iter().map(|e| format!("time_{e}_min")))
        .collect();
    w.write_record(&header).map_err(io_error)?;
    for edge in g.edges() {
        let mut row = vec![edge.u.clone(), edge.v.clone(), edge.distance_km.to_string()];
        row.extend(
            epochs
                .iter()
                .map(|e| edge.time_min.get(*e).map_or(String::new(), f64::to_string)),
        );
        w.write_record(&row).map_err(io_error)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes a variables CSV in the ingest format.
pub fn export_variables(table: &VariableTable, out: &mut impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let header: Vec<String> = std::iter::once("id".to_string())
        .chain(
            table
                .columns()
                .iter()
                .map(|c| format!("{}:{}", c.name, c.tag.suffix())),
        )
        .collect();
    w.write_record(&header).map_err(io_error)?;
    for (row, id) in table.ids().iter().enumerate() {
        let record: Vec<String> = std::iter::once(id.clone())
            .chain(table.columns().iter().map(|c| c.values[row].to_string()))
            .collect();
        w.write_record(&record).map_err(io_error)?;
    }
    w.flush()?;
    Ok(())
}

/// Renders `(x, y, fitted_y)` rows as CSV text.
pub fn series_csv(rows: &[(f64, f64, f64)]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["x", "y", "fitted_y"])
        .expect("in-memory write");
    for &(x, y, fitted) in rows {
        w.write_record([x.to_string(), y.to_string(), fitted.to_string()])
            .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv output is UTF-8")
}

fn io_error(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

/// Attribute column lookup keyed by node id.
pub fn attribute_by_id(g: &SpatialGraph, name: &str) -> BTreeMap<String, f64> {
    g.nodes()
        .iter()
        .filter_map(|n| n.attributes.get(name).map(|v| (n.id.clone(), *v)))
        .collect()
}
