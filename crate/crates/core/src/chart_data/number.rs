//! Lenient numeric parsing for table cells and extracted answers.

use std::str::FromStr;

use rust_decimal::Decimal;

/// Parses a cell or answer string into an exact decimal.
///
/// Accepts surrounding whitespace, a leading sign, `$`/`£` currency marks,
/// `,` thousands separators, a trailing `%` (kept as a bare magnitude, so
/// `"47 %"` is 47) and scientific notation. `nan` in any case yields `None`,
/// as does anything else that is not a number.
pub fn parse_number(raw: &str) -> Option<Decimal> {
    let mut s = raw.trim();
    if s.is_empty() || s.eq_ignore_ascii_case("nan") {
        return None;
    }
    if let Some(rest) = s.strip_suffix('%') {
        s = rest.trim_end();
    }

    let (negative, body) = match s.as_bytes().first() {
        Some(b'-') => (true, &s[1..]),
        Some(b'+') => (false, &s[1..]),
        _ => (false, s),
    };
    let body = body.trim_start().trim_start_matches(['$', '£']).trim_start();
    if body.is_empty() {
        return None;
    }

    let cleaned: String = if body.contains(',') {
        if !thousands_grouping_ok(body) {
            return None;
        }
        body.chars().filter(|&c| c != ',').collect()
    } else {
        body.to_string()
    };

    if !cleaned.chars().all(|c| c.is_ascii_digit() || matches!(c, '.' | 'e' | 'E' | '-' | '+')) {
        return None;
    }
    if !cleaned.starts_with(|c: char| c.is_ascii_digit() || c == '.') {
        return None;
    }

    let value = if cleaned.contains(['e', 'E']) {
        Decimal::from_scientific(&cleaned).ok()?
    } else {
        if cleaned.contains(['-', '+']) {
            return None;
        }
        Decimal::from_str(&cleaned).ok()?
    };
    Some(if negative { -value } else { value })
}

// "1,234,567.5" is fine, "1,23" and ",5" are not.
fn thousands_grouping_ok(s: &str) -> bool {
    let int_part = s.split(['.', 'e', 'E']).next().unwrap_or("");
    let mut groups = int_part.split(',');
    let first = groups.next().unwrap_or("");
    if first.is_empty() || first.len() > 3 {
        return false;
    }
    groups.all(|g| g.len() == 3) && !s[int_part.len()..].contains(',')
}

/// Number of digits after the decimal point in a stated number like `0.7358`.
pub fn stated_decimals(raw: &str) -> u32 {
    let s = raw.trim().trim_end_matches('%').trim_end();
    let mantissa = s.split(['e', 'E']).next().unwrap_or(s);
    match mantissa.split_once('.') {
        Some((_, frac)) => frac.chars().take_while(|c| c.is_ascii_digit()).count() as u32,
        None => 0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dec(s: &str) -> Decimal {
        s.parse().unwrap()
    }

    #[test]
    fn accepts_the_formats_tables_mix() {
        assert_eq!(parse_number("8.5"), Some(dec("8.5")));
        assert_eq!(parse_number("47 %"), Some(dec("47")));
        assert_eq!(parse_number("100.11%"), Some(dec("100.11")));
        assert_eq!(parse_number("$1,234"), Some(dec("1234")));
        assert_eq!(parse_number("£ 21,890.5"), Some(dec("21890.5")));
        assert_eq!(parse_number("  -3.25 "), Some(dec("-3.25")));
        assert_eq!(parse_number("-$5"), Some(dec("-5")));
        assert_eq!(parse_number("1.5e3"), Some(dec("1500")));
        assert_eq!(parse_number("2E-2"), Some(dec("0.02")));
        assert_eq!(parse_number(".5"), Some(dec("0.5")));
    }

    #[test]
    fn rejects_non_numbers() {
        for s in ["nan", "NaN", "", " ", "2019/20", "2025*", "abc", "1,23", "%", "$", "1-2", "e5", "--1"] {
            assert_eq!(parse_number(s), None, "{s:?}");
        }
    }

    #[test]
    fn decimal_places_of_stated_values() {
        assert_eq!(stated_decimals("0.7358"), 4);
        assert_eq!(stated_decimals("155"), 0);
        assert_eq!(stated_decimals("6.7466666667%"), 10);
        assert_eq!(stated_decimals("1.12"), 2);
    }
}
