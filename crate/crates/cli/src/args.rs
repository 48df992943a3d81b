//! Parsers for rationals, vectors, ranges and Chern characters on the
//! command line.

use stabkit::scalar::parse_rational;
use stabkit::{Character, ChernCharacter, Rational};

pub fn rational(s: &str) -> Result<Rational, String> {
    parse_rational(s).ok_or_else(|| format!("not a rational number: {s:?}"))
}

/// A parsed list; a newtype so clap takes it as one value.
#[derive(Clone, Debug, PartialEq)]
pub struct List<T>(pub Vec<T>);

pub fn vector_arg(s: &str) -> Result<List<Rational>, String> {
    vector(s).map(List)
}

pub fn int_box_arg(s: &str) -> Result<List<(i64, i64)>, String> {
    int_box(s).map(List)
}

pub fn rational_box_arg(s: &str) -> Result<List<(Rational, Rational)>, String> {
    rational_box(s).map(List)
}

/// Rationals separated by commas, semicolons or spaces.
pub fn vector(s: &str) -> Result<Vec<Rational>, String> {
    s.split(|c: char| c == ',' || c == ';' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(rational)
        .collect()
}

/// `lo:hi` with rational ends.
pub fn rational_range(s: &str) -> Result<(Rational, Rational), String> {
    let (a, b) = s
        .split_once(':')
        .ok_or_else(|| format!("expected lo:hi, got {s:?}"))?;
    Ok((rational(a)?, rational(b)?))
}

/// `lo:hi:step`.
pub fn grid_range(s: &str) -> Result<(Rational, Rational, Rational), String> {
    let parts: Vec<&str> = s.split(':').collect();
    match parts[..] {
        [a, b, c] => Ok((rational(a)?, rational(b)?, rational(c)?)),
        _ => Err(format!("expected lo:hi:step, got {s:?}")),
    }
}

/// `lo:hi,lo:hi,…` with integer ends.
pub fn int_box(s: &str) -> Result<Vec<(i64, i64)>, String> {
    s.split(',')
        .filter(|t| !t.is_empty())
        .map(|t| {
            let (a, b) = t
                .split_once(':')
                .ok_or_else(|| format!("expected lo:hi, got {t:?}"))?;
            let p = |x: &str| x.trim().parse::<i64>().map_err(|e| format!("{x:?}: {e}"));
            Ok((p(a)?, p(b)?))
        })
        .collect()
}

/// `lo:hi,lo:hi,…` with rational ends.
pub fn rational_box(s: &str) -> Result<Vec<(Rational, Rational)>, String> {
    s.split(',')
        .filter(|t| !t.is_empty())
        .map(rational_range)
        .collect()
}

/// `r;c1_1,…,c1_ρ;s`, the flat `r,c1…,s`, or the display form `(r, [c1…], s)`.
pub fn character(s: &str) -> Result<Character, String> {
    let cleaned: String = s
        .chars()
        .filter(|c| !matches!(c, '(' | ')' | '[' | ']'))
        .collect();
    let v = vector(&cleaned)?;
    if v.len() < 3 {
        return Err(format!("a character needs ch0, ch1 and ch2, got {s:?}"));
    }
    ChernCharacter::from_slice(&v).map_err(|e| e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn parses_vectors_and_ranges() {
        assert_eq!(vector("1, -1/2").unwrap(), vec![q(1, 1), q(-1, 2)]);
        assert_eq!(rational_range("-2:5/2").unwrap(), (q(-2, 1), q(5, 2)));
        assert_eq!(int_box("-1:1,0:3").unwrap(), vec![(-1, 1), (0, 3)]);
        assert!(rational("x").is_err());
        assert_eq!(
            grid_range("-1:1:1/4").unwrap(),
            (q(-1, 1), q(1, 1), q(1, 4))
        );
        assert!(grid_range("0:1").is_err());
    }

    #[test]
    fn parses_both_character_forms() {
        let a = character("1,0,2").unwrap();
        let b = character("(1, [0], 2)").unwrap();
        assert_eq!(a, b);
        assert_eq!(character("1;0;2").unwrap(), a);
        assert_eq!(a.ch1, vec![q(0, 1)]);
        assert!(character("1,2").is_err());
    }
}
