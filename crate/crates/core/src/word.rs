//! Words in the marking generators and the curve classes they represent.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::hyp::Isometry;

/// A word in generators `0..n`; letter `g + 1` stands for generator `g`,
/// `-(g + 1)` for its inverse.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Word(pub Vec<i32>);

impl Word {
    pub fn gen(g: usize) -> Self {
        Word(vec![g as i32 + 1])
    }

    pub fn gen_inv(g: usize) -> Self {
        Word(vec![-(g as i32 + 1)])
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn letters(&self) -> &[i32] {
        &self.0
    }

    pub fn max_generator(&self) -> Option<usize> {
        self.0.iter().map(|l| l.unsigned_abs() as usize - 1).max()
    }

    pub fn inverse(&self) -> Self {
        Word(self.0.iter().rev().map(|l| -l).collect())
    }

    pub fn concat(&self, other: &Word) -> Self {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn pow(&self, n: u32) -> Self {
        Word(self.0.iter().copied().cycle().take(self.0.len() * n as usize).collect())
    }

    pub fn conjugate(&self, by: &Word) -> Self {
        by.concat(self).concat(&by.inverse())
    }

    /// Free reduction.
    pub fn reduced(&self) -> Self {
        let mut out: Vec<i32> = Vec::with_capacity(self.0.len());
        for &l in &self.0 {
            if out.last() == Some(&-l) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Word(out)
    }

    pub fn cyclically_reduced(&self) -> Self {
        let mut w = self.reduced().0;
        while w.len() >= 2 && w[0] == -w[w.len() - 1] {
            w.pop();
            w.remove(0);
        }
        Word(w)
    }

    /// Image under the homomorphism sending generator `g` to `images[g]`, reduced.
    pub fn substitute(&self, images: &[Word]) -> Self {
        let mut v = Vec::new();
        for &l in &self.0 {
            let w = &images[l.unsigned_abs() as usize - 1];
            if l > 0 {
                v.extend_from_slice(&w.0);
            } else {
                v.extend(w.0.iter().rev().map(|x| -x));
            }
        }
        Word(v).reduced()
    }

    /// `ln |trace|` of the image, multiplied out with a running scale so long
    /// words with huge entries neither overflow nor get renormalized.
    pub fn log_abs_trace(&self, images: &[Isometry]) -> f64 {
        let mut m = [1.0, 0.0, 0.0, 1.0];
        let mut log_scale = 0.0;
        for &l in &self.0 {
            let g = images[l.unsigned_abs() as usize - 1];
            let [a, b, c, d] = if l > 0 { g.entries() } else { g.inverse().entries() };
            m = [m[0] * a + m[1] * c, m[0] * b + m[1] * d, m[2] * a + m[3] * c, m[2] * b + m[3] * d];
            let k = m.iter().fold(0.0f64, |x, y| x.max(y.abs()));
            if k > 1e8 {
                m.iter_mut().for_each(|x| *x /= k);
                log_scale += k.ln();
            }
        }
        (m[0] + m[3]).abs().ln() + log_scale
    }

    pub fn eval(&self, images: &[Isometry]) -> Isometry {
        self.0.iter().fold(Isometry::IDENTITY, |acc, &l| {
            let g = images[l.unsigned_abs() as usize - 1];
            acc * if l > 0 { g } else { g.inverse() }
        })
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        for (k, l) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(" ")?;
            }
            if *l > 0 {
                write!(f, "g{}", l - 1)?;
            } else {
                write!(f, "g{}^-1", -l - 1)?;
            }
        }
        Ok(())
    }
}

/// A free homotopy class of closed curves, given by a word.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CurveClass {
    pub word: Word,
    /// Certified simple by construction (marking curves); `false` means unknown.
    #[serde(default)]
    pub simple: bool,
    /// Index of the cone point whose peripheral loop this is.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub peripheral: Option<usize>,
}

impl CurveClass {
    pub fn new(word: Word) -> Self {
        CurveClass { word: word.cyclically_reduced(), simple: false, peripheral: None }
    }

    pub(crate) fn simple(word: Word) -> Self {
        CurveClass { word: word.cyclically_reduced(), simple: true, peripheral: None }
    }

    pub fn inverse(&self) -> Self {
        CurveClass { word: self.word.inverse(), ..self.clone() }
    }

    pub fn power(&self, n: u32) -> Self {
        CurveClass { word: self.word.pow(n), simple: self.simple && n == 1, peripheral: None }
    }
}

impl fmt::Display for CurveClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.word)
    }
}
