//! Number formatting and metadata headers shared by every CSV writer.

use std::fmt::Write as _;

use sha2::{Digest, Sha256};

/// Formats like C's `%.{sig}g`: `sig` significant digits, trailing zeros trimmed,
/// scientific notation outside `[1e-5, 10^sig)`.
pub fn sig(x: f64, sig: usize) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let p = sig.max(1);
    let e_repr = format!("{:.*e}", p - 1, x);
    let (mantissa, exp) = e_repr.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -5 || exp >= p as i32 {
        format!(
            "{}e{}{:02}",
            trim_zeros(mantissa),
            if exp < 0 { '-' } else { '+' },
            exp.abs()
        )
    } else {
        let decimals = (p as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

/// Nine significant digits, the precision of every float column.
pub fn f9(x: f64) -> String {
    sig(x, 9)
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// `# `-prefixed metadata block placed at the top of every report file.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Metadata {
    pub entries: Vec<(String, String)>,
}

impl Metadata {
    pub fn new(tool: &str, version: &str) -> Self {
        let mut m = Metadata::default();
        m.push("tool", format!("{tool} {version}"));
        m
    }

    pub fn push(&mut self, key: impl Into<String>, value: impl ToString) -> &mut Self {
        self.entries.push((key.into(), value.to_string()));
        self
    }

    pub fn lines(&self) -> Vec<String> {
        self.entries.iter().map(|(k, v)| format!("{k} = {v}")).collect()
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        for l in self.lines() {
            let _ = writeln!(s, "# {l}");
        }
        s
    }
}

/// Hex SHA-256 over a sequence of byte chunks.
pub fn digest<'a>(chunks: impl IntoIterator<Item = &'a [u8]>) -> String {
    let mut h = Sha256::new();
    for c in chunks {
        h.update((c.len() as u64).to_le_bytes());
        h.update(c);
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}
