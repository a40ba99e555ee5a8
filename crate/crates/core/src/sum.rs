//! Compensated summation used by the entropy and l1 accumulations, where
//! long sums of small terms would otherwise shed precision.

#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        KahanSum::default()
    }

    pub fn add(&mut self, x: f64) {
        let y = x - self.comp;
        let t = self.sum + y;
        self.comp = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum
    }
}

pub fn kahan_sum<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
    let mut s = KahanSum::new();
    for x in iter {
        s.add(x);
    }
    s.value()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensates_small_terms() {
        // 1 + 1e-16 added 10^4 times loses the tail in naive f64 summation
        let mut s = KahanSum::new();
        s.add(1.0);
        for _ in 0..10_000 {
            s.add(1e-16);
        }
        assert!((s.value() - (1.0 + 1e-12)).abs() < 1e-15);
        assert_eq!(kahan_sum([0.1; 10]), {
            let mut k = KahanSum::new();
            for _ in 0..10 {
                k.add(0.1);
            }
            k.value()
        });
    }
}
