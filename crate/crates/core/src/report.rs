//! Report serialization: CSV and a small JSON document per spectrum report,
//! sweep tables, and fit summaries. Floats are written in shortest
//! round-trip form, so parse(serialize(x)) is bit-identical.

use crate::convergence::{FitOutcome, FitResult, RateFamily, SweepTable};
use crate::error::{Error, Result};
use crate::spectra::{SolverTag, SpectrumEntry, SpectrumReport};
use crate::Error as E;

/// Shortest round-trip decimal form of a float.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:?}")
}

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

pub const SPECTRUM_CSV_HEADER: &str = "eps,lambda,gamma,mult,solver";

/// One spectrum report as CSV rows `eps,lambda,gamma,mult,solver`; the limit
/// report writes `limit` in the eps column and appends a zero-multiplicity
/// comment row.
pub fn report_to_csv(rep: &SpectrumReport) -> String {
    let mut out = String::new();
    out.push_str(SPECTRUM_CSV_HEADER);
    out.push('\n');
    if let Some(z) = rep.zero_mult {
        out.push_str(&format!("# zero_mult,{z}\n"));
    }
    let eps_label = match rep.eps {
        Some(e) => fmt_f64(e),
        None => "limit".to_string(),
    };
    for e in &rep.entries {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            eps_label,
            fmt_f64(e.lambda),
            fmt_f64(e.gamma),
            e.mult,
            e.solver.label()
        ));
    }
    out
}

/// Parse a single-report CSV produced by [`report_to_csv`].
pub fn report_from_csv(text: &str) -> Result<SpectrumReport> {
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| E::invalid("empty csv"))?;
    if header != SPECTRUM_CSV_HEADER {
        return Err(E::invalid(format!("unexpected csv header `{header}`")));
    }
    let mut zero_mult = None;
    let mut eps: Option<Option<f64>> = None;
    let mut entries = Vec::new();
    for (i, line) in lines.enumerate() {
        let line_no = i + 2;
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix("# zero_mult,") {
            zero_mult = Some(
                rest.parse::<usize>()
                    .map_err(|_| Error::config(line_no, format!("bad zero_mult `{rest}`")))?,
            );
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 5 {
            return Err(Error::config(
                line_no,
                format!("expected 5 columns, got {}", cols.len()),
            ));
        }
        let this_eps = if cols[0] == "limit" {
            None
        } else {
            Some(parse_f64(line_no, cols[0])?)
        };
        match &eps {
            None => eps = Some(this_eps),
            Some(prev) if *prev == this_eps => {}
            Some(_) => return Err(Error::config(line_no, "mixed eps values in one report")),
        }
        entries.push(SpectrumEntry {
            lambda: parse_f64(line_no, cols[1])?,
            gamma: parse_f64(line_no, cols[2])?,
            mult: cols[3]
                .parse()
                .map_err(|_| Error::config(line_no, format!("bad mult `{}`", cols[3])))?,
            solver: SolverTag::parse(cols[4])?,
        });
    }
    let eps = eps.unwrap_or(Some(f64::NAN));
    if eps.is_some_and(|e| e.is_nan()) {
        return Err(E::invalid("csv contains no data rows"));
    }
    Ok(SpectrumReport {
        eps,
        entries,
        zero_mult,
    })
}

fn parse_f64(line: usize, tok: &str) -> Result<f64> {
    tok.parse::<f64>()
        .map_err(|_| Error::config(line, format!("cannot parse float `{tok}`")))
}

/// Sweep table as CSV: the per-eps reports concatenated, limit rows last.
pub fn sweep_to_csv(table: &SweepTable) -> String {
    let mut out = String::new();
    out.push_str(SPECTRUM_CSV_HEADER);
    out.push('\n');
    for rep in &table.reports {
        let eps_label = fmt_f64(rep.eps.unwrap());
        for e in &rep.entries {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                eps_label,
                fmt_f64(e.lambda),
                fmt_f64(e.gamma),
                e.mult,
                e.solver.label()
            ));
        }
    }
    if let Some(z) = table.limit.zero_mult {
        out.push_str(&format!("# zero_mult,{z}\n"));
    }
    for e in &table.limit.entries {
        out.push_str(&format!(
            "limit,{},{},{},{}\n",
            fmt_f64(e.lambda),
            fmt_f64(e.gamma),
            e.mult,
            e.solver.label()
        ));
    }
    out
}

/// Two-column data file (eps, lambda_N) for one index, gnuplot-friendly.
pub fn index_data_file(table: &SweepTable, n: usize) -> String {
    let mut out = String::new();
    for (i, &eps) in table.eps_list.iter().enumerate() {
        if let Some(l) = table.lambda_at(i, n) {
            out.push_str(&format!("{} {}\n", fmt_f64(eps), fmt_f64(l)));
        }
    }
    out
}

// ---------------------------------------------------------------------------
// JSON subset
// ---------------------------------------------------------------------------

/// Minimal JSON value: enough for the report documents.
#[derive(Debug, Clone, PartialEq)]
pub enum Json {
    Null,
    Bool(bool),
    Num(f64),
    Str(String),
    Arr(Vec<Json>),
    Obj(Vec<(String, Json)>),
}

impl Json {
    pub fn render(&self) -> String {
        let mut s = String::new();
        self.write(&mut s);
        s
    }

    fn write(&self, out: &mut String) {
        match self {
            Json::Null => out.push_str("null"),
            Json::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
            Json::Num(x) => out.push_str(&fmt_f64(*x)),
            Json::Str(s) => {
                out.push('"');
                for c in s.chars() {
                    match c {
                        '"' => out.push_str("\\\""),
                        '\\' => out.push_str("\\\\"),
                        '\n' => out.push_str("\\n"),
                        c => out.push(c),
                    }
                }
                out.push('"');
            }
            Json::Arr(items) => {
                out.push('[');
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    item.write(out);
                }
                out.push(']');
            }
            Json::Obj(fields) => {
                out.push('{');
                for (i, (k, v)) in fields.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    Json::Str(k.clone()).write(out);
                    out.push(':');
                    v.write(out);
                }
                out.push('}');
            }
        }
    }

    pub fn parse(text: &str) -> Result<Json> {
        let bytes: Vec<char> = text.chars().collect();
        let mut pos = 0usize;
        let v = parse_value(&bytes, &mut pos)?;
        skip_ws(&bytes, &mut pos);
        if pos != bytes.len() {
            return Err(E::invalid(format!("trailing json content at offset {pos}")));
        }
        Ok(v)
    }

    pub fn get<'a>(&'a self, key: &str) -> Option<&'a Json> {
        match self {
            Json::Obj(fields) => fields.iter().find(|(k, _)| k == key).map(|(_, v)| v),
            _ => None,
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Json::Num(x) => Some(*x),
            _ => None,
        }
    }

    pub fn as_str(&self) -> Option<&str> {
        match self {
            Json::Str(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_arr(&self) -> Option<&[Json]> {
        match self {
            Json::Arr(v) => Some(v),
            _ => None,
        }
    }
}

fn skip_ws(b: &[char], pos: &mut usize) {
    while *pos < b.len() && b[*pos].is_whitespace() {
        *pos += 1;
    }
}

fn parse_value(b: &[char], pos: &mut usize) -> Result<Json> {
    skip_ws(b, pos);
    let c = *b
        .get(*pos)
        .ok_or_else(|| E::invalid("unexpected end of json"))?;
    match c {
        '{' => {
            *pos += 1;
            let mut fields = Vec::new();
            skip_ws(b, pos);
            if b.get(*pos) == Some(&'}') {
                *pos += 1;
                return Ok(Json::Obj(fields));
            }
            loop {
                skip_ws(b, pos);
                let key = match parse_value(b, pos)? {
                    Json::Str(s) => s,
                    _ => return Err(E::invalid("json object key must be a string")),
                };
                skip_ws(b, pos);
                if b.get(*pos) != Some(&':') {
                    return Err(E::invalid("expected ':' in json object"));
                }
                *pos += 1;
                let val = parse_value(b, pos)?;
                fields.push((key, val));
                skip_ws(b, pos);
                match b.get(*pos) {
                    Some(',') => *pos += 1,
                    Some('}') => {
                        *pos += 1;
                        return Ok(Json::Obj(fields));
                    }
                    _ => return Err(E::invalid("expected ',' or '}' in json object")),
                }
            }
        }
        '[' => {
            *pos += 1;
            let mut items = Vec::new();
            skip_ws(b, pos);
            if b.get(*pos) == Some(&']') {
                *pos += 1;
                return Ok(Json::Arr(items));
            }
            loop {
                items.push(parse_value(b, pos)?);
                skip_ws(b, pos);
                match b.get(*pos) {
                    Some(',') => *pos += 1,
                    Some(']') => {
                        *pos += 1;
                        return Ok(Json::Arr(items));
                    }
                    _ => return Err(E::invalid("expected ',' or ']' in json array")),
                }
            }
        }
        '"' => {
            *pos += 1;
            let mut s = String::new();
            while *pos < b.len() {
                let c = b[*pos];
                *pos += 1;
                match c {
                    '"' => return Ok(Json::Str(s)),
                    '\\' => {
                        let esc = *b.get(*pos).ok_or_else(|| E::invalid("bad escape"))?;
                        *pos += 1;
                        match esc {
                            '"' => s.push('"'),
                            '\\' => s.push('\\'),
                            'n' => s.push('\n'),
                            other => {
                                return Err(E::invalid(format!("unsupported escape \\{other}")))
                            }
                        }
                    }
                    c => s.push(c),
                }
            }
            Err(E::invalid("unterminated json string"))
        }
        't' | 'f' | 'n' => {
            let rest: String = b[*pos..].iter().take(5).collect();
            if rest.starts_with("true") {
                *pos += 4;
                Ok(Json::Bool(true))
            } else if rest.starts_with("false") {
                *pos += 5;
                Ok(Json::Bool(false))
            } else if rest.starts_with("null") {
                *pos += 4;
                Ok(Json::Null)
            } else {
                Err(E::invalid(format!("bad json literal near `{rest}`")))
            }
        }
        _ => {
            let start = *pos;
            while *pos < b.len()
                && (b[*pos].is_ascii_digit() || matches!(b[*pos], '-' | '+' | '.' | 'e' | 'E'))
            {
                *pos += 1;
            }
            let tok: String = b[start..*pos].iter().collect();
            tok.parse::<f64>()
                .map(Json::Num)
                .map_err(|_| E::invalid(format!("bad json number `{tok}`")))
        }
    }
}

/// Spectrum report as a JSON document.
pub fn report_to_json(rep: &SpectrumReport) -> String {
    let mut fields = vec![(
        "eps".to_string(),
        match rep.eps {
            Some(e) => Json::Num(e),
            None => Json::Str("limit".to_string()),
        },
    )];
    if let Some(z) = rep.zero_mult {
        fields.push(("zero_mult".to_string(), Json::Num(z as f64)));
    }
    let entries: Vec<Json> = rep
        .entries
        .iter()
        .map(|e| {
            Json::Obj(vec![
                ("lambda".to_string(), Json::Num(e.lambda)),
                ("gamma".to_string(), Json::Num(e.gamma)),
                ("mult".to_string(), Json::Num(e.mult as f64)),
                (
                    "solver".to_string(),
                    Json::Str(e.solver.label().to_string()),
                ),
            ])
        })
        .collect();
    fields.push(("entries".to_string(), Json::Arr(entries)));
    Json::Obj(fields).render()
}

pub fn report_from_json(text: &str) -> Result<SpectrumReport> {
    let doc = Json::parse(text)?;
    let eps = match doc.get("eps") {
        Some(Json::Num(e)) => Some(*e),
        Some(Json::Str(s)) if s == "limit" => None,
        _ => return Err(E::invalid("report json: bad or missing `eps`")),
    };
    let zero_mult = match doc.get("zero_mult") {
        Some(Json::Num(z)) => Some(*z as usize),
        None => None,
        _ => return Err(E::invalid("report json: bad `zero_mult`")),
    };
    let raw = doc
        .get("entries")
        .and_then(Json::as_arr)
        .ok_or_else(|| E::invalid("report json: missing `entries`"))?;
    let mut entries = Vec::with_capacity(raw.len());
    for e in raw {
        entries.push(SpectrumEntry {
            lambda: e
                .get("lambda")
                .and_then(Json::as_f64)
                .ok_or_else(|| E::invalid("entry missing lambda"))?,
            gamma: e
                .get("gamma")
                .and_then(Json::as_f64)
                .ok_or_else(|| E::invalid("entry missing gamma"))?,
            mult: e
                .get("mult")
                .and_then(Json::as_f64)
                .ok_or_else(|| E::invalid("entry missing mult"))? as usize,
            solver: SolverTag::parse(
                e.get("solver")
                    .and_then(Json::as_str)
                    .ok_or_else(|| E::invalid("entry missing solver"))?,
            )?,
        });
    }
    Ok(SpectrumReport {
        eps,
        entries,
        zero_mult,
    })
}

/// Fit summary as a JSON document.
pub fn fits_to_json(fits: &[FitResult]) -> String {
    let items: Vec<Json> = fits
        .iter()
        .map(|f| {
            let mut fields = vec![
                ("n".to_string(), Json::Num(f.n as f64)),
                ("limit_lambda".to_string(), Json::Num(f.limit_lambda)),
            ];
            match &f.outcome {
                FitOutcome::Converged => {
                    fields.push(("outcome".to_string(), Json::Str("converged".into())));
                    fields.push(("rate".to_string(), Json::Num(0.0)));
                }
                FitOutcome::NonMonotone => {
                    fields.push(("outcome".to_string(), Json::Str("non-monotone".into())));
                }
                FitOutcome::Fit {
                    family,
                    alpha,
                    beta,
                    r_squared,
                } => {
                    fields.push(("outcome".to_string(), Json::Str("fit".into())));
                    let fam = match family {
                        RateFamily::Power => "power",
                        RateFamily::InverseLog => "inverse-log",
                        RateFamily::PowerLog => "power-log",
                    };
                    fields.push(("family".to_string(), Json::Str(fam.into())));
                    fields.push(("alpha".to_string(), Json::Num(*alpha)));
                    fields.push(("beta".to_string(), Json::Num(*beta)));
                    fields.push(("r_squared".to_string(), Json::Num(*r_squared)));
                }
            }
            Json::Obj(fields)
        })
        .collect();
    Json::Arr(items).render()
}
