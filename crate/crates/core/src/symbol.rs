use alloc::vec::Vec;
use core::fmt;

/// Arity of the signature: each symbol compares two consecutive values.
pub const SIGNATURE_ARITY: u64 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Symbol {
    Lt,
    Eq,
    Gt,
}

impl Symbol {
    pub const ALL: [Symbol; 3] = [Symbol::Lt, Symbol::Eq, Symbol::Gt];

    pub fn index(self) -> usize {
        match self {
            Symbol::Lt => 0,
            Symbol::Eq => 1,
            Symbol::Gt => 2,
        }
    }

    pub fn from_index(i: usize) -> Symbol {
        Symbol::ALL[i]
    }

    pub fn as_char(self) -> char {
        match self {
            Symbol::Lt => '<',
            Symbol::Eq => '=',
            Symbol::Gt => '>',
        }
    }

    pub fn from_char(c: char) -> Option<Symbol> {
        match c {
            '<' => Some(Symbol::Lt),
            '=' => Some(Symbol::Eq),
            '>' => Some(Symbol::Gt),
            _ => None,
        }
    }

    pub fn mirror(self) -> Symbol {
        match self {
            Symbol::Lt => Symbol::Gt,
            Symbol::Eq => Symbol::Eq,
            Symbol::Gt => Symbol::Lt,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Signature(pub Vec<Symbol>);

impl Signature {
    pub fn empty() -> Self {
        Signature(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.0
    }

    /// Length of the series this signature belongs to.
    pub fn series_len(&self) -> usize {
        self.0.len() + 1
    }

    pub fn parse(s: &str) -> Option<Signature> {
        s.chars().map(Symbol::from_char).collect::<Option<Vec<_>>>().map(Signature)
    }

    /// A series realising this signature, starting at 0 with unit steps.
    pub fn to_series(&self) -> TimeSeries {
        let mut v = Vec::with_capacity(self.len() + 1);
        let mut x = 0i64;
        v.push(x);
        for s in &self.0 {
            x += match s {
                Symbol::Lt => 1,
                Symbol::Eq => 0,
                Symbol::Gt => -1,
            };
            v.push(x);
        }
        TimeSeries(v)
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.0 {
            write!(f, "{}", s.as_char())?;
        }
        Ok(())
    }
}

impl From<Vec<Symbol>> for Signature {
    fn from(v: Vec<Symbol>) -> Self {
        Signature(v)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TimeSeries(pub Vec<i64>);

impl TimeSeries {
    pub fn new(values: Vec<i64>) -> Option<Self> {
        if values.is_empty() {
            None
        } else {
            Some(TimeSeries(values))
        }
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn values(&self) -> &[i64] {
        &self.0
    }
}

pub fn signature_of(series: &TimeSeries) -> Signature {
    Signature(
        series
            .0
            .windows(2)
            .map(|w| match w[0].cmp(&w[1]) {
                core::cmp::Ordering::Less => Symbol::Lt,
                core::cmp::Ordering::Equal => Symbol::Eq,
                core::cmp::Ordering::Greater => Symbol::Gt,
            })
            .collect(),
    )
}

/// All 3^len signatures in lexicographic order (`<` before `=` before `>`).
pub fn enumerate_signatures(len: usize) -> SignatureIter {
    SignatureIter { digits: alloc::vec![0; len], done: false }
}

pub struct SignatureIter {
    digits: Vec<u8>,
    done: bool,
}

impl Iterator for SignatureIter {
    type Item = Signature;

    fn next(&mut self) -> Option<Signature> {
        if self.done {
            return None;
        }
        let out = Signature(self.digits.iter().map(|&d| Symbol::from_index(d as usize)).collect());
        let mut i = self.digits.len();
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            i -= 1;
            if self.digits[i] < 2 {
                self.digits[i] += 1;
                for d in &mut self.digits[i + 1..] {
                    *d = 0;
                }
                break;
            }
        }
        Some(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ts(v: &[i64]) -> TimeSeries {
        TimeSeries(v.to_vec())
    }

    #[test]
    fn signature_of_example_series() {
        let s = signature_of(&ts(&[0, 1, 2, 2, 0, 0, 4, 1]));
        assert_eq!(s.to_string(), "<<=>=<>");
        assert!(signature_of(&ts(&[5])).is_empty());
        assert_eq!(signature_of(&ts(&[3, 3, 3])).to_string(), "==");
    }

    #[test]
    fn enumeration_counts_and_order() {
        let all: Vec<_> = enumerate_signatures(1).map(|s| s.to_string()).collect();
        assert_eq!(all, ["<", "=", ">"]);
        assert_eq!(enumerate_signatures(0).count(), 1);
        assert_eq!(enumerate_signatures(8).count(), 6561);
        let v: Vec<_> = enumerate_signatures(3).collect();
        assert!(v.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn series_roundtrip() {
        for sig in enumerate_signatures(5) {
            assert_eq!(signature_of(&sig.to_series()), sig);
        }
        assert_eq!(Signature::parse("<=x"), None);
    }
}
