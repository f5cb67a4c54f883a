use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;

pub const OUT_DIR_ENV: &str = "TRILINEAR_OUT_DIR";

/// 17 significant digits, so the text round-trips to the same `f64`.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// A CSV table with a `#` config line in front.
pub struct Table {
    pub config: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(config: String, header: &[&str]) -> Self {
        Table { config, header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn render(&self) -> String {
        let mut s = format!("# {}\n{}\n", self.config, self.header.join(","));
        for row in &self.rows {
            s.push_str(&row.join(","));
            s.push('\n');
        }
        s
    }

    /// Writes to `out` (or `default_name`) under the output directory, or to
    /// stdout when `out` is `-`. Returns the path written, if any.
    pub fn write(&self, out: Option<&str>, default_name: &str) -> io::Result<Option<PathBuf>> {
        if out == Some("-") {
            io::stdout().write_all(self.render().as_bytes())?;
            return Ok(None);
        }
        let dir = std::env::var_os(OUT_DIR_ENV).map(PathBuf::from).unwrap_or_else(|| PathBuf::from("."));
        let path = dir.join(out.unwrap_or(default_name));
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent)?;
        }
        fs::write(&path, self.render())?;
        Ok(Some(path))
    }
}

/// File-name friendly form of a value such as `1/4` or `0.5+1i`.
pub fn slug(s: &str) -> String {
    s.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '.' || c == '-' { c } else { '_' })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn render_layout() {
        let mut t = Table::new("cmd k=1".into(), &["a", "b"]);
        t.rows.push(vec!["0".into(), num(0.1)]);
        assert_eq!(t.render(), "# cmd k=1\na,b\n0,1.0000000000000001e-1\n");
        assert_eq!(slug("1/4"), "1_4");
    }
}
