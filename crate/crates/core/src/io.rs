//! Plain-text inputs: set files (one rational per line) and point files
//! (`x y` per line). Blank lines and `#` comments are ignored.

use std::path::Path;

use crate::algebra::rational::parse_rational;
use crate::algebra::Rational;
use crate::apps::PlanarPoint;
use crate::error::{Error, Result};
use crate::grid::IndexedSet;

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(n, line)| {
        let body = line.split('#').next().unwrap_or("").trim();
        (!body.is_empty()).then_some((n + 1, body))
    })
}

fn at_line(n: usize, e: Error) -> Error {
    Error::InvalidArgument(format!("line {n}: {e}"))
}

pub fn parse_values(text: &str) -> Result<Vec<Rational>> {
    content_lines(text)
        .map(|(n, body)| parse_rational(body).map_err(|e| at_line(n, e)))
        .collect()
}

/// Duplicates are rejected.
pub fn parse_set(text: &str) -> Result<IndexedSet> {
    IndexedSet::strict(parse_values(text)?)
}

pub fn parse_points(text: &str) -> Result<Vec<PlanarPoint>> {
    content_lines(text)
        .map(|(n, body)| {
            let fields: Vec<&str> = body.split_whitespace().collect();
            match fields[..] {
                [x, y] => Ok(PlanarPoint::new(
                    parse_rational(x).map_err(|e| at_line(n, e))?,
                    parse_rational(y).map_err(|e| at_line(n, e))?,
                )),
                _ => Err(Error::InvalidArgument(format!(
                    "line {n}: expected `x y`, got `{body}`"
                ))),
            }
        })
        .collect()
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidArgument(format!("cannot read {}: {e}", path.display())))
}

pub fn read_set(path: &Path) -> Result<IndexedSet> {
    parse_set(&read(path)?)
}

pub fn read_points(path: &Path) -> Result<Vec<PlanarPoint>> {
    parse_points(&read(path)?)
}

pub fn format_set(set: &IndexedSet) -> String {
    set.elements().iter().map(|r| format!("{r}\n")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::{frac, int};

    #[test]
    fn set_file() {
        let s = parse_set("# header\n3\n-1/2  # inline\n\n 7/14\n").unwrap();
        assert_eq!(s.elements(), &[frac(-1, 2), frac(1, 2), int(3)]);
        assert_eq!(parse_set(&format_set(&s)).unwrap(), s);
        assert!(parse_set("1\n1\n").is_err());
        let e = parse_set("1\nx\n").unwrap_err().to_string();
        assert!(e.contains("line 2"), "{e}");
    }

    #[test]
    fn point_file() {
        let p = parse_points("0 0\n1/2 -3\n").unwrap();
        assert_eq!(p[1], PlanarPoint::new(frac(1, 2), int(-3)));
        assert!(parse_points("1 2 3\n").is_err());
    }
}
