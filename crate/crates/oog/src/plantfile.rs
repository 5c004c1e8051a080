//! Text format for two-output plants.
//!
//! A plant file is UTF-8 text made of sections `A`, `B`, `Cp`, `Dp`, `Cr`,
//! `Dr` in any order. Each section is the name on its own token, then
//! `rows cols`, then rows·cols whitespace-separated decimals in row-major
//! order. `#` starts a comment that runs to the end of the line. `Dp` and
//! `Dr` may be omitted and default to zero matrices of the inferred size.

use std::collections::HashMap;
use std::path::Path;

use faer::Mat;

use crate::error::{Error, Result};
use crate::ss::TwoOutputPlant;

const SECTION_NAMES: [&str; 6] = ["A", "B", "Cp", "Dp", "Cr", "Dr"];

struct Token<'a> {
    text: &'a str,
    line: usize,
}

fn tokenize(input: &str) -> Vec<Token<'_>> {
    let mut tokens = Vec::new();
    for (lineno, raw) in input.lines().enumerate() {
        let body = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        };
        for word in body.split_whitespace() {
            tokens.push(Token {
                text: word,
                line: lineno + 1,
            });
        }
    }
    tokens
}

fn parse_usize(tok: &Token<'_>, what: &str) -> Result<usize> {
    tok.text.parse::<usize>().map_err(|_| Error::Parse {
        line: tok.line,
        msg: format!("expected {what}, got `{}`", tok.text),
    })
}

fn parse_f64(tok: &Token<'_>) -> Result<f64> {
    tok.text.parse::<f64>().map_err(|_| Error::Parse {
        line: tok.line,
        msg: format!("expected a decimal number, got `{}`", tok.text),
    })
}

/// Parses the plant file format from a string.
pub fn parse_plant(input: &str) -> Result<TwoOutputPlant> {
    let tokens = tokenize(input);
    let mut sections: HashMap<&str, Mat<f64>> = HashMap::new();
    let mut pos = 0usize;
    while pos < tokens.len() {
        let head = &tokens[pos];
        let name = SECTION_NAMES
            .iter()
            .find(|&&s| s == head.text)
            .ok_or_else(|| Error::Parse {
                line: head.line,
                msg: format!("unknown section `{}`", head.text),
            })?;
        if sections.contains_key(name) {
            return Err(Error::Parse {
                line: head.line,
                msg: format!("duplicate section `{name}`"),
            });
        }
        if pos + 2 >= tokens.len() {
            return Err(Error::Parse {
                line: head.line,
                msg: format!("section `{name}` is missing its dimensions"),
            });
        }
        let rows = parse_usize(&tokens[pos + 1], "row count")?;
        let cols = parse_usize(&tokens[pos + 2], "column count")?;
        pos += 3;
        if rows == 0 || cols == 0 {
            return Err(Error::Parse {
                line: head.line,
                msg: format!("section `{name}` has an empty dimension {rows}x{cols}"),
            });
        }
        let mut data = Vec::with_capacity(rows * cols);
        for _ in 0..rows * cols {
            let tok = tokens.get(pos).ok_or_else(|| Error::Parse {
                line: head.line,
                msg: format!(
                    "section `{name}` ends after {} of {} values",
                    data.len(),
                    rows * cols
                ),
            })?;
            data.push(parse_f64(tok)?);
            pos += 1;
        }
        sections.insert(name, Mat::from_fn(rows, cols, |i, j| data[i * cols + j]));
    }

    let take = |sections: &mut HashMap<&str, Mat<f64>>, name: &str| -> Result<Mat<f64>> {
        sections.remove(name).ok_or_else(|| Error::Parse {
            line: 0,
            msg: format!("missing required section `{name}`"),
        })
    };
    let mut sections = sections;
    let a = take(&mut sections, "A")?;
    let b = take(&mut sections, "B")?;
    let cp = take(&mut sections, "Cp")?;
    let cr = take(&mut sections, "Cr")?;
    let m = b.ncols();
    let dp = sections
        .remove("Dp")
        .unwrap_or_else(|| Mat::zeros(cp.nrows(), m));
    let dr = sections
        .remove("Dr")
        .unwrap_or_else(|| Mat::zeros(cr.nrows(), m));
    TwoOutputPlant::new(a, b, cp, dp, cr, dr)
}

/// Reads and parses a plant file from disk.
pub fn read_plant(path: impl AsRef<Path>) -> Result<TwoOutputPlant> {
    let text = std::fs::read_to_string(path)?;
    parse_plant(&text)
}

fn write_section(out: &mut String, name: &str, m: faer::MatRef<'_, f64>) {
    out.push_str(name);
    out.push('\n');
    out.push_str(&format!("{} {}\n", m.nrows(), m.ncols()));
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols()).map(|j| format!("{:?}", m[(i, j)])).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
}

/// Serializes a plant in the file format, with full round-trip precision.
pub fn format_plant(plant: &TwoOutputPlant) -> String {
    let mut out = String::new();
    write_section(&mut out, "A", plant.a());
    write_section(&mut out, "B", plant.b());
    write_section(&mut out, "Cp", plant.cp());
    write_section(&mut out, "Dp", plant.dp());
    write_section(&mut out, "Cr", plant.cr());
    write_section(&mut out, "Dr", plant.dr());
    out
}

/// Writes a plant file to disk.
pub fn write_plant(path: impl AsRef<Path>, plant: &TwoOutputPlant) -> Result<()> {
    std::fs::write(path, format_plant(plant))?;
    Ok(())
}
