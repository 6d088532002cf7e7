use serde_json::{Map, Number, Value};

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Nine significant digits, fixed notation for moderate exponents and
/// scientific otherwise, trailing zeros removed. Non-finite values print as
/// `inf`, `-inf`, `nan`.
pub fn sig9(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.into();
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.8e}");
    let (mant, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..9).contains(&exp) {
        let decimals = (8 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    } else {
        format!("{}e{exp}", trim_zeros(mant))
    }
}

/// Six decimals for human-readable records.
pub fn dec6(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.6}")
    } else {
        sig9(x)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Field {
    Num(f64),
    Bool(bool),
    Text(String),
}

/// Ordered list of named fields, printed as `key = value` lines or JSON.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Record(Vec<(&'static str, Field)>);

impl Record {
    pub fn num(&mut self, key: &'static str, x: f64) -> &mut Self {
        self.0.push((key, Field::Num(x)));
        self
    }

    pub fn flag(&mut self, key: &'static str, b: bool) -> &mut Self {
        self.0.push((key, Field::Bool(b)));
        self
    }

    pub fn text(&mut self, key: &'static str, s: impl Into<String>) -> &mut Self {
        self.0.push((key, Field::Text(s.into())));
        self
    }

    pub fn to_text(&self) -> String {
        let width = self.0.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
        let mut out = String::new();
        for (k, v) in &self.0 {
            let v = match v {
                Field::Num(x) => dec6(*x),
                Field::Bool(b) => b.to_string(),
                Field::Text(s) => s.clone(),
            };
            out.push_str(&format!("{k:<width$} = {v}\n"));
        }
        out
    }

    /// Full-precision JSON object; non-finite numbers become strings.
    pub fn to_json(&self) -> String {
        let mut m = Map::new();
        for (k, v) in &self.0 {
            let v = match v {
                Field::Num(x) => Number::from_f64(*x).map(Value::Number).unwrap_or_else(|| Value::String(sig9(*x))),
                Field::Bool(b) => Value::Bool(*b),
                Field::Text(s) => Value::String(s.clone()),
            };
            m.insert((*k).to_string(), v);
        }
        let mut s = serde_json::to_string_pretty(&Value::Object(m)).expect("plain values serialize");
        s.push('\n');
        s
    }
}
