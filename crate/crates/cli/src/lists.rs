//! Value lists accepted by flags and config files.
//!
//! A list is comma-separated items, each a single value or an inclusive
//! linear range `start..end:count`. Time lists may also use the tunnelling
//! period: `T`, `T/6`, `2*T`, `3*T/4`, so `0..T/2:201` is 201 evenly spaced
//! times from 0 to `T_N/2`.

use std::str::FromStr;

use serde::Deserialize;

/// `value` or `value · T`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Term {
    pub value: f64,
    pub in_periods: bool,
}

impl Term {
    fn resolve(self, period: Option<f64>) -> Result<f64, String> {
        match (self.in_periods, period) {
            (false, _) => Ok(self.value),
            (true, Some(t)) => Ok(self.value * t),
            (true, None) => Err("time uses T but no tunnelling period is available".into()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Item {
    Point(Term),
    Range(Term, Term, usize),
}

fn parse_number(s: &str) -> Result<f64, String> {
    let s = s.trim();
    let v: f64 = s.parse().map_err(|_| format!("'{s}' is not a number"))?;
    if !v.is_finite() {
        return Err(format!("'{s}' is not finite"));
    }
    Ok(v)
}

fn parse_term(s: &str, allow_period: bool) -> Result<Term, String> {
    let s = s.trim();
    let Some(at) = s.find('T') else {
        return Ok(Term { value: parse_number(s)?, in_periods: false });
    };
    if !allow_period {
        return Err(format!("'{s}': T is only meaningful for times"));
    }
    let prefix = s[..at].trim();
    let factor = match prefix.strip_suffix('*') {
        Some(k) => parse_number(k)?,
        None if prefix.is_empty() => 1.0,
        None => return Err(format!("'{s}': expected k*T")),
    };
    let suffix = s[at + 1..].trim();
    let divisor = match suffix.strip_prefix('/') {
        Some(d) => parse_number(d)?,
        None if suffix.is_empty() => 1.0,
        None => return Err(format!("'{s}': expected T/d")),
    };
    if divisor == 0.0 {
        return Err(format!("'{s}': division by zero"));
    }
    Ok(Term { value: factor / divisor, in_periods: true })
}

fn parse_item(s: &str, allow_period: bool) -> Result<Item, String> {
    let s = s.trim();
    if s.is_empty() {
        return Err("empty list entry".into());
    }
    let Some((range, count)) = s.split_once(':') else {
        return Ok(Item::Point(parse_term(s, allow_period)?));
    };
    let (start, end) = range.split_once("..").ok_or_else(|| format!("'{s}': expected start..end:count"))?;
    let count: usize = count.trim().parse().map_err(|_| format!("'{s}': count must be a positive integer"))?;
    if count == 0 {
        return Err(format!("'{s}': count must be positive"));
    }
    Ok(Item::Range(parse_term(start, allow_period)?, parse_term(end, allow_period)?, count))
}

fn parse_items(s: &str, allow_period: bool) -> Result<Vec<Item>, String> {
    s.split(',').map(|part| parse_item(part, allow_period)).collect()
}

fn expand(items: &[Item], period: Option<f64>) -> Result<Vec<f64>, String> {
    let mut out = Vec::new();
    for item in items {
        match *item {
            Item::Point(t) => out.push(t.resolve(period)?),
            Item::Range(a, b, count) => {
                let (a, b) = (a.resolve(period)?, b.resolve(period)?);
                if count == 1 {
                    out.push(a);
                } else {
                    let step = (b - a) / (count - 1) as f64;
                    out.extend((0..count).map(|k| if k + 1 == count { b } else { a + step * k as f64 }));
                }
            }
        }
    }
    Ok(out)
}

/// Either a number or a string in the list grammar.
#[derive(Deserialize)]
#[serde(untagged)]
enum Scalar {
    Number(f64),
    Text(String),
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawList {
    One(Scalar),
    Many(Vec<Scalar>),
}

fn items_from_raw(raw: RawList, allow_period: bool) -> Result<Vec<Item>, String> {
    let scalars = match raw {
        RawList::One(s) => vec![s],
        RawList::Many(v) => v,
    };
    let mut items = Vec::new();
    for s in scalars {
        match s {
            Scalar::Number(v) => items.push(Item::Point(Term { value: v, in_periods: false })),
            Scalar::Text(t) => items.extend(parse_items(&t, allow_period)?),
        }
    }
    Ok(items)
}

/// Plain real values such as transmissions.
#[derive(Debug, Clone, PartialEq)]
pub struct ValueList(pub Vec<f64>);

impl FromStr for ValueList {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Ok(ValueList(expand(&parse_items(s, false)?, None)?))
    }
}

impl<'de> Deserialize<'de> for ValueList {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let items = items_from_raw(RawList::deserialize(d)?, false).map_err(serde::de::Error::custom)?;
        expand(&items, None).map(ValueList).map_err(serde::de::Error::custom)
    }
}

/// Times, possibly in units of the tunnelling period.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeList(pub Vec<Item>);

impl TimeList {
    pub fn uses_period(&self) -> bool {
        self.0.iter().any(|item| match *item {
            Item::Point(t) => t.in_periods,
            Item::Range(a, b, _) => a.in_periods || b.in_periods,
        })
    }

    pub fn resolve(&self, period: Option<f64>) -> Result<Vec<f64>, String> {
        expand(&self.0, period)
    }
}

impl FromStr for TimeList {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        parse_items(s, true).map(TimeList)
    }
}

impl<'de> Deserialize<'de> for TimeList {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        items_from_raw(RawList::deserialize(d)?, true).map(TimeList).map_err(serde::de::Error::custom)
    }
}

/// Coherence orders: `1,2,5` or inclusive ranges `1..5`.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderList(pub Vec<usize>);

fn parse_orders(s: &str) -> Result<Vec<usize>, String> {
    let mut out = Vec::new();
    for part in s.split(',') {
        let part = part.trim();
        let parse = |x: &str| x.trim().parse::<usize>().map_err(|_| format!("'{x}' is not a nonnegative integer"));
        match part.split_once("..") {
            Some((a, b)) => {
                let (a, b) = (parse(a)?, parse(b)?);
                if a > b {
                    return Err(format!("'{part}': empty range"));
                }
                out.extend(a..=b);
            }
            None => out.push(parse(part)?),
        }
    }
    Ok(out)
}

impl FromStr for OrderList {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        parse_orders(s).map(OrderList)
    }
}

impl<'de> Deserialize<'de> for OrderList {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            One(usize),
            Many(Vec<usize>),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::One(n) => Ok(OrderList(vec![n])),
            Raw::Many(v) => Ok(OrderList(v)),
            Raw::Text(s) => parse_orders(&s).map(OrderList).map_err(serde::de::Error::custom),
        }
    }
}
