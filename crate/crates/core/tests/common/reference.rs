//! Literal double-loop implementations of the decomposition metrics, kept
//! deliberately naive to serve as a test oracle.

#![allow(dead_code)]

use svcsplit::graph::CallGraph;
use svcsplit::metrics::Decomposition;

pub struct Reference {
    /// Dense call-count matrix.
    pub inv: Vec<Vec<u64>>,
    /// Non-empty services as member lists, in label order.
    pub services: Vec<Vec<usize>>,
    /// Capability names per method.
    pub caps: Vec<Vec<String>>,
    pub all_caps: Vec<String>,
}

impl Reference {
    pub fn new(g: &CallGraph, d: &Decomposition) -> Self {
        let n = g.len();
        let mut inv = vec![vec![0; n]; n];
        for a in 0..n {
            for b in 0..n {
                inv[a][b] = g.inv(a, b);
            }
        }
        let max_label = d.assignment().iter().copied().max().unwrap_or(0);
        let services = (0..=max_label)
            .map(|s| (0..n).filter(|&m| d.assignment()[m] == s).collect::<Vec<_>>())
            .filter(|members| !members.is_empty())
            .collect();
        let caps = (0..n).map(|m| g.method_cap_names(m).into_iter().collect()).collect();
        Self { inv, services, caps, all_caps: g.capabilities().to_vec() }
    }

    fn links(&self, from: &[usize], to: &[usize]) -> usize {
        let mut count = 0;
        for &a in from {
            for &b in to {
                if self.inv[a][b] > 0 {
                    count += 1;
                }
            }
        }
        count
    }

    pub fn cohesion(&self) -> f64 {
        let mut sum = 0.0;
        for s in &self.services {
            sum += self.links(s, s) as f64 / (s.len() * s.len()) as f64;
        }
        sum / self.services.len() as f64
    }

    pub fn coupling(&self) -> f64 {
        let k = self.services.len();
        if k < 2 {
            return 0.0;
        }
        let mut sum = 0.0;
        let mut pairs = 0;
        for i in 0..k {
            for j in i + 1..k {
                let (si, sj) = (&self.services[i], &self.services[j]);
                let nu = self.links(si, sj) + self.links(sj, si);
                sum += nu as f64 / (2 * si.len() * sj.len()) as f64;
                pairs += 1;
            }
        }
        sum / pairs as f64
    }

    pub fn mq(&self) -> f64 {
        if self.services.len() == 1 {
            self.cohesion()
        } else {
            self.cohesion() - self.coupling()
        }
    }

    fn service_of(&self, m: usize) -> usize {
        self.services.iter().position(|s| s.contains(&m)).unwrap()
    }

    pub fn icp(&self) -> f64 {
        if self.services.len() < 2 {
            return 0.0;
        }
        let n = self.inv.len();
        let mut cross = 0.0;
        let mut total = 0.0;
        for a in 0..n {
            for b in 0..n {
                if self.inv[a][b] == 0 {
                    continue;
                }
                let w = (self.inv[a][b] as f64).ln() + 1.0;
                total += w;
                if self.service_of(a) != self.service_of(b) {
                    cross += w;
                }
            }
        }
        if total == 0.0 {
            0.0
        } else {
            cross / total
        }
    }

    pub fn ifn(&self) -> f64 {
        let mut total = 0;
        for (i, s) in self.services.iter().enumerate() {
            for &m in s {
                let called_from_outside = (0..self.inv.len()).any(|a| self.inv[a][m] > 0 && self.service_of(a) != i);
                if called_from_outside {
                    total += 1;
                }
            }
        }
        total as f64 / self.services.len() as f64
    }

    fn entropy(counts: &[f64], outcomes: usize) -> f64 {
        if outcomes < 2 {
            return 0.0;
        }
        let total: f64 = counts.iter().sum();
        let mut h = 0.0;
        for &c in counts {
            if c > 0.0 {
                h -= (c / total) * (c / total).ln();
            }
        }
        h / (outcomes as f64).ln()
    }

    pub fn bcp(&self) -> f64 {
        let mut sum = 0.0;
        for s in &self.services {
            let counts: Vec<f64> = self
                .all_caps
                .iter()
                .map(|c| s.iter().filter(|&&m| self.caps[m].contains(c)).count() as f64)
                .collect();
            sum += if counts.iter().sum::<f64>() == 0.0 { 1.0 } else { Self::entropy(&counts, self.all_caps.len()) };
        }
        (1.0 - sum / self.services.len() as f64) * 100.0
    }

    pub fn di(&self) -> f64 {
        let mut sum = 0.0;
        let mut used = 0;
        for c in &self.all_caps {
            let counts: Vec<f64> = self
                .services
                .iter()
                .map(|s| s.iter().filter(|&&m| self.caps[m].contains(c)).count() as f64)
                .collect();
            if counts.iter().sum::<f64>() == 0.0 {
                continue;
            }
            sum += Self::entropy(&counts, self.services.len());
            used += 1;
        }
        if used == 0 {
            0.0
        } else {
            (1.0 - sum / used as f64) * 100.0
        }
    }

    pub fn abcp(&self) -> f64 {
        (self.bcp() + self.di()) / 2.0
    }
}
