//! Exact Newton polygon geometry.
//!
//! Vertices are indexed from the one adjacent to the horizontal ray (largest
//! `v1`, smallest `v2`) to the one adjacent to the vertical ray. Compact edge
//! `i` joins vertex `i` to vertex `i + 1` and has slope `-1/m_i`, with
//! `m_0 > m_1 > ... > 0`.

use alloc::vec::Vec;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::rational::{self, Rational};
use crate::terms::TermSum;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Vertex {
    pub v1: u32,
    pub v2: u32,
}

impl Vertex {
    pub fn new(v1: u32, v2: u32) -> Self {
        Vertex { v1, v2 }
    }

    pub fn swapped(self) -> Self {
        Vertex { v1: self.v2, v2: self.v1 }
    }

    /// `v1 + m * v2`, the value of the supporting functional with slope `-1/m`.
    pub fn weight(self, m: &Rational) -> Rational {
        rational::int(i64::from(self.v1)) + m * rational::int(i64::from(self.v2))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CompactEdge {
    /// The endpoint nearer the horizontal ray.
    pub start: Vertex,
    pub end: Vertex,
    /// Slope parameter: the edge has slope `-1/m`.
    pub m: Rational,
    /// Exponent pairs of `f` on the edge, sorted.
    pub support: Vec<(u32, u32)>,
}

impl CompactEdge {
    /// Common value of `a + m*b` along the edge.
    pub fn level(&self) -> Rational {
        self.start.weight(&self.m)
    }

    pub fn contains(&self, a: u32, b: u32) -> bool {
        Vertex::new(a, b).weight(&self.m) == self.level()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct NewtonPolygon {
    vertices: Vec<Vertex>,
    edges: Vec<CompactEdge>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NewtonError {
    #[error("edge is not a compact edge of the Newton polygon of f")]
    EdgeNotInPolygon,
    #[error("empty support")]
    EmptySupport,
}

impl NewtonPolygon {
    /// Polygon of the convex hull of `Q_ab` over the given support.
    pub fn from_support(points: &[(u32, u32)]) -> Result<Self, NewtonError> {
        if points.is_empty() {
            return Err(NewtonError::EmptySupport);
        }
        let mut pts: Vec<(u32, u32)> = points.to_vec();
        pts.sort_unstable();
        pts.dedup();

        // Bottom vertex: least b, then least a. Everything with larger a sits
        // inside its quadrant.
        let bottom = *pts.iter().min_by_key(|&&(a, b)| (b, a)).expect("nonempty");
        // One candidate per abscissa: the lowest point.
        let mut column: Vec<(u32, u32)> = Vec::new();
        for &(a, b) in pts.iter().filter(|p| p.0 <= bottom.0) {
            match column.last() {
                Some(&(la, _)) if la == a => {}
                _ => column.push((a, b)),
            }
        }

        // Lower convex chain from the leftmost column point to the bottom
        // vertex, strictly convex (collinear points dropped).
        let mut chain: Vec<(u32, u32)> = Vec::new();
        for &p in &column {
            while chain.len() >= 2 {
                let o = chain[chain.len() - 2];
                let a = chain[chain.len() - 1];
                if cross(o, a, p) <= 0 {
                    chain.pop();
                } else {
                    break;
                }
            }
            chain.push(p);
        }
        // A leading run of points that are not strictly decreasing in b
        // cannot occur (each column keeps its lowest point and the chain
        // ends at the global minimum of b), but the chain may start above
        // a point further right with the same a: handled by `column`.
        chain.reverse();
        let vertices: Vec<Vertex> = chain.into_iter().map(|(a, b)| Vertex::new(a, b)).collect();

        let edges = vertices
            .windows(2)
            .map(|w| {
                let (s, e) = (w[0], w[1]);
                let m = Rational::new(
                    i64::from(s.v1 - e.v1).into(),
                    i64::from(e.v2 - s.v2).into(),
                );
                let level = s.weight(&m);
                let support = pts
                    .iter()
                    .copied()
                    .filter(|&(a, b)| Vertex::new(a, b).weight(&m) == level)
                    .collect();
                CompactEdge { start: s, end: e, m, support }
            })
            .collect();
        Ok(NewtonPolygon { vertices, edges })
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[CompactEdge] {
        &self.edges
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    /// Slope parameters `m_1 > ... > m_{n-1}` of the compact edges.
    pub fn slopes(&self) -> Vec<Rational> {
        self.edges.iter().map(|e| e.m.clone()).collect()
    }

    /// Height of the horizontal ray: `v2` of the first vertex.
    pub fn horizontal_ray_height(&self) -> u32 {
        self.vertices[0].v2
    }

    /// Abscissa of the vertical ray: `v1` of the last vertex.
    pub fn vertical_ray_abscissa(&self) -> u32 {
        self.vertices[self.vertices.len() - 1].v1
    }

    /// Whether `(x, y)` lies in `N(f)`.
    pub fn contains(&self, x: &Rational, y: &Rational) -> bool {
        let x0 = rational::int(i64::from(self.vertical_ray_abscissa()));
        let y0 = rational::int(i64::from(self.horizontal_ray_height()));
        if *x < x0 || *y < y0 {
            return false;
        }
        self.edges.iter().all(|e| x + &e.m * y >= e.level())
    }
}

fn cross(o: (u32, u32), a: (u32, u32), b: (u32, u32)) -> i64 {
    let (ox, oy) = (i64::from(o.0), i64::from(o.1));
    (i64::from(a.0) - ox) * (i64::from(b.1) - oy) - (i64::from(a.1) - oy) * (i64::from(b.0) - ox)
}

pub fn build_polygon(f: &TermSum) -> NewtonPolygon {
    NewtonPolygon::from_support(&f.support()).expect("TermSum is nonempty")
}

/// Newton distance `d(f) = inf { t : (t, t) in N(f) }`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NewtonDistance(pub Rational);

impl NewtonDistance {
    pub fn value(&self) -> &Rational {
        &self.0
    }

    /// The integrability threshold `1/d`.
    pub fn critical_rho(&self) -> Rational {
        self.0.recip()
    }
}

/// `N(f)` is cut out by the two rays and the supporting line of every compact
/// edge, so the diagonal enters it at the largest of the three kinds of
/// crossing.
pub fn newton_distance(p: &NewtonPolygon) -> NewtonDistance {
    let mut d = rational::int(i64::from(p.vertical_ray_abscissa().max(p.horizontal_ray_height())));
    for e in &p.edges {
        let t = e.level() / (Rational::one() + &e.m);
        if t > d {
            d = t;
        }
    }
    debug_assert!(!d.is_zero());
    NewtonDistance(d)
}

/// `f_e`: the terms of `f` whose exponents lie on the compact edge `e`.
pub fn edge_polynomial(f: &TermSum, e: &CompactEdge) -> Result<TermSum, NewtonError> {
    if !build_polygon(f).edges.contains(e) {
        return Err(NewtonError::EdgeNotInPolygon);
    }
    Ok(f.select(&e.support))
}

/// Reflection across the diagonal: the polygon of `f(x2, x1)`.
pub fn reflect_polygon(p: &NewtonPolygon) -> NewtonPolygon {
    let vertices = p.vertices.iter().rev().map(|v| v.swapped()).collect();
    let edges = p
        .edges
        .iter()
        .rev()
        .map(|e| {
            let mut support: Vec<(u32, u32)> = e.support.iter().map(|&(a, b)| (b, a)).collect();
            support.sort_unstable();
            CompactEdge { start: e.end.swapped(), end: e.start.swapped(), m: e.m.recip(), support }
        })
        .collect();
    NewtonPolygon { vertices, edges }
}
