//! CSV encoding of results. Every table has a header row and floats are
//! printed with 17 significant digits so values survive a round trip.

use crate::error::{Error, Result};
use crate::exact::ExactResult;
use crate::swp::SwpEstimate;

/// 17 significant digits in scientific notation.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Collects rows into CSV text.
pub struct CsvTable {
    writer: csv::Writer<Vec<u8>>,
}

impl CsvTable {
    pub fn new(header: &[&str]) -> Self {
        let mut writer = csv::WriterBuilder::new()
            .terminator(csv::Terminator::CRLF)
            .from_writer(Vec::new());
        writer.write_record(header).expect("writing to memory");
        CsvTable { writer }
    }

    pub fn row<I, S>(&mut self, fields: I)
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        self.writer.write_record(fields).expect("writing to memory");
    }

    pub fn finish(self) -> String {
        let bytes = self.writer.into_inner().expect("flushing to memory");
        String::from_utf8(bytes).expect("CSV output is UTF-8")
    }
}

/// Rows `(domain, kind, index, a, value)` for every marginal entry, then
/// `partition` rows per domain and an `alpha` row when both are present.
pub fn exact_csv(primal: Option<&ExactResult>, dual: Option<&ExactResult>) -> String {
    let mut t = CsvTable::new(&["domain", "kind", "index", "a", "value"]);
    for r in primal.iter().chain(dual.iter()) {
        let domain = r.domain.as_str();
        for (kind, rows) in [("edge", &r.edge_marginals), ("vertex", &r.vertex_marginals)] {
            for (i, m) in rows.iter().enumerate() {
                for (a, &v) in m.iter().enumerate() {
                    t.row([domain, kind, &i.to_string(), &a.to_string(), &fmt_f64(v)]);
                }
            }
        }
    }
    for r in primal.iter().chain(dual.iter()) {
        t.row([
            r.domain.as_str(),
            "partition",
            "",
            "",
            &fmt_f64(r.partition),
        ]);
    }
    if let (Some(p), Some(d)) = (primal, dual) {
        t.row(["both", "alpha", "", "", &fmt_f64(d.partition / p.partition)]);
    }
    t.finish()
}

/// Rows `(edge, a, <value_name>)`.
pub fn edge_marginals_csv(value_name: &str, marginals: &[Vec<f64>]) -> String {
    let mut t = CsvTable::new(&["edge", "a", value_name]);
    for (e, m) in marginals.iter().enumerate() {
        for (a, &v) in m.iter().enumerate() {
            t.row([e.to_string(), a.to_string(), fmt_f64(v)]);
        }
    }
    t.finish()
}

/// Rows `(edge, p_hat, std_err)`.
pub fn swp_csv(estimate: &SwpEstimate) -> String {
    let mut t = CsvTable::new(&["edge", "p_hat", "std_err"]);
    for (e, (p, s)) in estimate.p_hat.iter().zip(&estimate.std_err).enumerate() {
        t.row([e.to_string(), fmt_f64(*p), fmt_f64(*s)]);
    }
    t.finish()
}

/// Parses `(edge, a, value)` rows into per-edge vectors of length `q`.
/// Every `(edge, a)` pair for `edge < edge_count` must appear exactly once.
pub fn parse_edge_marginals_csv(text: &str, edge_count: usize, q: usize) -> Result<Vec<Vec<f64>>> {
    let bad = |msg: String| Error::InvalidParams(format!("marginal CSV: {msg}"));
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut out = vec![vec![f64::NAN; q]; edge_count];
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| bad(e.to_string()))?;
        if record.len() != 3 {
            return Err(bad(format!("row {} has {} fields", line + 1, record.len())));
        }
        let edge: usize = record[0]
            .parse()
            .map_err(|_| bad(format!("edge '{}'", &record[0])))?;
        let a: usize = record[1]
            .parse()
            .map_err(|_| bad(format!("symbol '{}'", &record[1])))?;
        let v: f64 = record[2]
            .parse()
            .map_err(|_| bad(format!("value '{}'", &record[2])))?;
        if edge >= edge_count || a >= q {
            return Err(bad(format!("entry ({edge}, {a}) out of range")));
        }
        if !out[edge][a].is_nan() {
            return Err(bad(format!("entry ({edge}, {a}) repeated")));
        }
        out[edge][a] = v;
    }
    if let Some(e) = out.iter().position(|m| m.iter().any(|v| v.is_nan())) {
        return Err(bad(format!("edge {e} is incomplete")));
    }
    Ok(out)
}
