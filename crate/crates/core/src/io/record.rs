use std::fmt::{self, Display};

/// One output line: a kind followed by `key=value` fields.
#[derive(Clone, Debug, PartialEq)]
pub struct Record {
    pub kind: &'static str,
    pub fields: Vec<(&'static str, String)>,
}

/// 17 significant digits, so a printed value parses back to the same `f64`.
pub fn format_float(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.16e}")
    }
}

impl Record {
    pub fn new(kind: &'static str) -> Self {
        Record { kind, fields: Vec::new() }
    }

    pub fn with(mut self, key: &'static str, value: impl Display) -> Self {
        self.fields.push((key, value.to_string()));
        self
    }

    pub fn float(self, key: &'static str, value: f64) -> Self {
        self.with(key, format_float(value))
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.fields.iter().find(|(k, _)| *k == key).map(|(_, v)| v.as_str())
    }
}

impl Display for Record {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.kind)?;
        for (k, v) in &self.fields {
            write!(f, " {k}={v}")?;
        }
        Ok(())
    }
}

/// Everything a command prints, in order.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ResultRecord {
    pub records: Vec<Record>,
    /// False when a `check` found a disagreement.
    pub success: bool,
}

impl ResultRecord {
    pub fn push(&mut self, r: Record) {
        self.records.push(r);
    }

    pub fn find(&self, kind: &str) -> Option<&Record> {
        self.records.iter().find(|r| r.kind == kind)
    }

    pub fn of_kind<'a>(&'a self, kind: &'a str) -> impl Iterator<Item = &'a Record> + 'a {
        self.records.iter().filter(move |r| r.kind == kind)
    }
}

impl Display for ResultRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.records {
            writeln!(f, "{r}")?;
        }
        Ok(())
    }
}
