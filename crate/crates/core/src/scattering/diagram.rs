use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rand::Rng;
use serde_json::{json, Value};

use super::series::{SeriesElement, WallFunction};
use crate::error::{Error, Result};
use crate::freezing::FreezeSpec;
use crate::ring::lattice::{lcm, primitive, rat, rat_frac};
use crate::ring::{LatticeVec, PStar};
use crate::seed::Seed;

/// Support of a wall in the projected unfrozen space; frozen directions are
/// always included.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Shape {
    /// the whole hyperplane `n0^perp`
    Line,
    /// the half-line spanned by a direction (rank 2 only)
    Ray(Vec<BigRational>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Wall {
    /// primitive, nonnegative, indexed by unfrozen positions
    pub normal: LatticeVec,
    pub shape: Shape,
    pub func: WallFunction,
    pub incoming: bool,
    /// `<f_i, n0'>` for every vertex `i`, where `n0'` is the primitive
    /// multiple of `n0` in the lattice spanned by `d_k e_k`
    weights: Vec<i64>,
    /// `<p*(e_q), n0'>` for every unfrozen position `q`
    pn: Vec<i64>,
    /// `1 / d_k` on unfrozen positions
    inv_d: Vec<BigRational>,
}

impl Wall {
    pub fn new(seed: &Seed, normal: LatticeVec, shape: Shape, func: WallFunction, incoming: bool) -> Self {
        let uf = seed.unfrozen();
        let d = seed.d();
        let mut s = 1;
        for (p, &k) in uf.iter().enumerate() {
            let g = num_integer::gcd(d[k], normal[p]);
            s = lcm(s, d[k] / g);
        }
        let mut weights = vec![0; seed.n()];
        for (p, &k) in uf.iter().enumerate() {
            weights[k] = s * normal[p] / d[k];
        }
        let pn = uf
            .iter()
            .map(|&q| (0..seed.n()).map(|i| weights[i] * seed.b(i, q)).sum())
            .collect();
        let inv_d = uf.iter().map(|&k| rat_frac(1, d[k])).collect();
        Self { normal, shape, func, incoming, weights, pn, inv_d }
    }

    /// `<m, n0'>` for `m` in `Z^I`.
    pub fn pairing(&self, m: &[i64]) -> i64 {
        self.weights.iter().zip(m).map(|(a, b)| a * b).sum()
    }

    /// `<base + p*(n), n0'>`
    pub fn pairing_series(&self, base: &[i64], n: &[i64]) -> i64 {
        self.pairing(base) + self.pn.iter().zip(n).map(|(a, b)| a * b).sum::<i64>()
    }

    /// `<P, n0>` for a projected point.
    pub fn height(&self, p: &[BigRational]) -> BigRational {
        let mut s = BigRational::zero();
        for ((x, &n), w) in p.iter().zip(self.normal.iter()).zip(&self.inv_d) {
            if n != 0 {
                s += x * rat(n) * w;
            }
        }
        s
    }

    /// Point of the hyperplane `n0^perp` lies on the support.
    fn contains_on_plane(&self, p: &[BigRational]) -> bool {
        match &self.shape {
            Shape::Line => true,
            Shape::Ray(u) => {
                let dot: BigRational = p.iter().zip(u).map(|(a, b)| a * b).sum();
                !dot.is_negative()
            }
        }
    }

    pub fn contains(&self, p: &[BigRational]) -> bool {
        self.height(p).is_zero() && self.contains_on_plane(p)
    }

    /// Nonnegative primitive normal and the multiplicity of `n = j * n0`.
    pub fn split(n: &[i64]) -> (LatticeVec, i64) {
        let (p, g) = primitive(n);
        (LatticeVec(p), g)
    }
}

/// Action of a path-ordered product on the generators `x^{f_i}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Automorphism {
    pub images: Vec<SeriesElement>,
}

impl Automorphism {
    pub fn identity(n: usize, r: usize) -> Self {
        Self { images: (0..n).map(|i| SeriesElement::monomial(LatticeVec::unit(n, i), r)).collect() }
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().all(|e| e.terms.len() == 1 && e.terms.iter().all(|(n, c)| n.is_zero() && *c == BigInt::from(1)))
    }

    /// Lowest total degree carrying a nontrivial term, if any.
    pub fn defect_degree(&self) -> Option<i64> {
        self.images
            .iter()
            .flat_map(|e| e.terms.keys().filter(|n| !n.is_zero()).map(|n| n.total()))
            .min()
    }
}

/// A crossing event: wall index and sign.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Crossing {
    pub wall: usize,
    pub sign: i64,
}

/// Order-truncated scattering diagram of a seed (classical).
#[derive(Clone, Debug)]
pub struct ScatteringDiagram {
    seed: Seed,
    pstar: PStar,
    order: i64,
    walls: Vec<Wall>,
}

impl ScatteringDiagram {
    /// Diagram consisting of the incoming walls `(e_k^perp, 1 + y_k)`.
    pub fn incoming(seed: &Seed, order: i64) -> Result<Self> {
        let r = seed.rank();
        let walls = (0..r)
            .map(|p| Wall::new(seed, LatticeVec::unit(r, p), Shape::Line, WallFunction::binomial(), true))
            .collect();
        Ok(Self { seed: seed.clone(), pstar: seed.pstar()?, order, walls })
    }

    pub fn seed(&self) -> &Seed {
        &self.seed
    }

    pub fn pstar(&self) -> &PStar {
        &self.pstar
    }

    pub fn order(&self) -> i64 {
        self.order
    }

    pub fn walls(&self) -> &[Wall] {
        &self.walls
    }

    pub fn rank(&self) -> usize {
        self.seed.rank()
    }

    /// Outgoing walls (those added by completion).
    pub fn outgoing(&self) -> impl Iterator<Item = &Wall> + '_ {
        self.walls.iter().filter(|w| !w.incoming)
    }

    /// Projection of a point of `R^I` to the unfrozen coordinates.
    pub fn project(&self, p: &[BigRational]) -> Vec<BigRational> {
        self.seed.unfrozen().iter().map(|&k| p[k].clone()).collect()
    }

    /// Projection of `p*(n0)` for a wall normal.
    pub fn projected_pstar(&self, n0: &[i64]) -> Vec<i64> {
        let v = self.pstar.apply(n0);
        self.seed.unfrozen().iter().map(|&k| v[k]).collect()
    }

    /// Applies one crossing to a truncated element.
    pub fn cross(&self, elem: &SeriesElement, wall: &Wall, sign: i64, order: i64) -> SeriesElement {
        let step = wall.normal.total();
        let jall = (order / step).max(0) as usize;
        let mut cache: HashMap<i64, Vec<BigInt>> = HashMap::new();
        let mut out = SeriesElement { base: elem.base.clone(), terms: BTreeMap::new() };
        for (n, c) in &elem.terms {
            let e = sign * wall.pairing_series(&elem.base, n);
            if e == 0 {
                out.add_term(n.clone(), c);
                continue;
            }
            let jmax = ((order - n.total()) / step).max(0) as usize;
            let pw = cache.entry(e).or_insert_with(|| wall.func.pow(e, jall));
            for (j, a) in pw.iter().enumerate().take(jmax + 1) {
                if a.is_zero() {
                    continue;
                }
                let m = n.add(&wall.normal.scale(j as i64));
                out.add_term(m, &(c * a));
            }
        }
        out
    }

    /// Crossings of the polyline through `pts` (projected coordinates), in time
    /// order. Vertices must avoid every wall support.
    pub fn crossings(&self, pts: &[Vec<BigRational>]) -> Result<Vec<Crossing>> {
        let r = self.rank();
        for p in pts {
            if let Some(w) = self.walls.iter().find(|w| w.contains(p)) {
                return Err(Error::NonGenericPath(format!("vertex lies on the wall with normal {}", w.normal)));
            }
        }
        let mut out = Vec::new();
        for seg in pts.windows(2) {
            let (a, b) = (&seg[0], &seg[1]);
            let mut hits: Vec<(BigRational, usize, i64)> = Vec::new();
            for (idx, w) in self.walls.iter().enumerate() {
                let ha = w.height(a);
                let hb = w.height(b);
                if ha.is_zero() || hb.is_zero() || ha.is_positive() == hb.is_positive() {
                    continue;
                }
                let t = &ha / (&ha - &hb);
                let p: Vec<BigRational> = a.iter().zip(b).map(|(x, y)| x + &t * (y - x)).collect();
                if r == 2 && p.iter().all(|x| x.is_zero()) {
                    return Err(Error::NonGenericPath("segment passes through the origin".into()));
                }
                if !w.contains_on_plane(&p) {
                    continue;
                }
                let sign = if (&ha - &hb).is_positive() { 1 } else { -1 };
                hits.push((t, idx, sign));
            }
            hits.sort_by(|x, y| x.0.cmp(&y.0).then(x.1.cmp(&y.1)));
            for pair in hits.windows(2) {
                if pair[0].0 == pair[1].0 && self.walls[pair[0].1].normal != self.walls[pair[1].1].normal {
                    return Err(Error::NonGenericPath("two walls crossed at one point".into()));
                }
            }
            out.extend(hits.into_iter().map(|(_, wall, sign)| Crossing { wall, sign }));
        }
        Ok(out)
    }

    /// Applies a list of crossings to an element in time order.
    pub fn apply(&self, elem: &SeriesElement, crossings: &[Crossing], order: i64) -> SeriesElement {
        crossings.iter().fold(elem.truncate(order), |acc, c| self.cross(&acc, &self.walls[c.wall], c.sign, order))
    }

    /// Path-ordered product along a polyline, truncated at `order`.
    pub fn path_product(&self, pts: &[Vec<BigRational>], order: i64) -> Result<Automorphism> {
        let cs = self.crossings(pts)?;
        let mut a = Automorphism::identity(self.seed.n(), self.rank());
        for img in a.images.iter_mut() {
            *img = self.apply(img, &cs, order);
        }
        Ok(a)
    }

    /// A path from the interior of the positive chamber to the negative one.
    pub fn positive_to_negative_path(&self) -> Vec<Vec<BigRational>> {
        match self.rank() {
            0 => vec![vec![], vec![]],
            1 => vec![vec![rat(1)], vec![rat(-1)]],
            _ => vec![
                vec![rat(1), rat_frac(1, 1013)],
                vec![rat_frac(-1, 1009), rat(1)],
                vec![rat(-1), rat_frac(-1, 1019)],
            ],
        }
    }

    /// `p_D`: path-ordered product from `C^+` to `C^-` at full order.
    pub fn p_d(&self) -> Result<Automorphism> {
        self.path_product(&self.positive_to_negative_path(), self.order)
    }

    /// Order-by-order completion for at most two unfrozen directions.
    pub fn complete(seed: &Seed, order: i64) -> Result<Self> {
        let r = seed.rank();
        if r > 2 {
            return Err(Error::UnsupportedRank(r));
        }
        let mut diag = Self::incoming(seed, order)?;
        if r < 2 {
            return Ok(diag);
        }
        for k in 1..=order {
            let aut = diag.loop_product(k)?;
            if let Some(dd) = aut.defect_degree() {
                if dd < k {
                    return Err(Error::Scattering(format!("defect of degree {dd} survived order {}", k - 1)));
                }
            }
            let mut fixes: BTreeMap<LatticeVec, BigInt> = BTreeMap::new();
            let mut ns: Vec<LatticeVec> = aut
                .images
                .iter()
                .flat_map(|e| e.terms.keys().filter(|n| n.total() == k).cloned())
                .collect();
            ns.sort();
            ns.dedup();
            for n in ns {
                let (n0, j) = Wall::split(&n);
                let probe = Wall::new(seed, n0.clone(), Shape::Line, WallFunction::one(), false);
                let u = diag.projected_pstar(&n0);
                let u: Vec<i64> = u.iter().map(|x| -x).collect();
                if u.iter().all(|&x| x == 0) {
                    return Err(Error::Scattering(format!("defect along {n0} with degenerate ray")));
                }
                // <-gamma', n0> for a counterclockwise loop at the ray through u
                let eps = probe.height(&[rat(u[1]), rat(-u[0])]);
                let eps = if eps.is_positive() { 1 } else { -1 };
                let mut c: Option<BigInt> = None;
                for (i, img) in aut.images.iter().enumerate() {
                    let a = img.coeff(&n);
                    let w = probe.weights[i];
                    if w == 0 {
                        if !a.is_zero() {
                            return Err(Error::Scattering(format!("defect at {n} on a vertex pairing trivially")));
                        }
                        continue;
                    }
                    let denom = BigInt::from(eps * w);
                    if (&a % &denom) != BigInt::zero() {
                        return Err(Error::Scattering(format!("non-integral wall coefficient at {n}")));
                    }
                    let ci = -(&a / &denom);
                    match &c {
                        None => c = Some(ci),
                        Some(c0) if *c0 != ci => {
                            return Err(Error::Scattering(format!("inconsistent defect at {n}")));
                        }
                        _ => {}
                    }
                }
                if let Some(c) = c {
                    if !c.is_zero() {
                        let _ = j;
                        fixes.insert(n, c);
                    }
                }
            }
            for (n, c) in fixes {
                let (n0, j) = Wall::split(&n);
                diag.add_to_ray(n0, j as usize, &c);
            }
            let check = diag.loop_product(k)?;
            if !check.is_identity() {
                return Err(Error::Scattering(format!("loop not trivial at order {k}")));
            }
        }
        Ok(diag)
    }

    fn add_to_ray(&mut self, n0: LatticeVec, j: usize, c: &BigInt) {
        if let Some(w) = self.walls.iter_mut().find(|w| !w.incoming && w.normal == n0) {
            w.func.add_coeff(j, c);
            return;
        }
        let u: Vec<BigRational> = self.projected_pstar(&n0).iter().map(|&x| rat(-x)).collect();
        let mut f = WallFunction::one();
        f.add_coeff(j, c);
        let w = Wall::new(&self.seed, n0, Shape::Ray(u), f, false);
        self.walls.push(w);
        let first_out = self.walls.iter().position(|w| !w.incoming).unwrap_or(self.walls.len());
        self.walls[first_out..].sort_by(|a, b| a.normal.cmp(&b.normal));
    }

    /// Loop around the origin of the unfrozen plane, truncated at `order`.
    pub fn loop_product(&self, order: i64) -> Result<Automorphism> {
        let mut last = None;
        for shift in 0..8i64 {
            let q = |k: i64| rat_frac(1, 1009 + 2 * shift + k);
            let pts = vec![
                vec![rat(1), q(0)],
                vec![-q(4), rat(1)],
                vec![rat(-1), -q(10)],
                vec![q(12), rat(-1)],
                vec![rat(1), q(0)],
            ];
            match self.path_product(&pts, order) {
                Ok(a) => return Ok(a),
                Err(e @ Error::NonGenericPath(_)) => last = Some(e),
                Err(e) => return Err(e),
            }
        }
        Err(last.unwrap())
    }

    /// Number of nonzero wall-function coefficients, i.e. walls counted after
    /// splitting each function into its monomial parts.
    pub fn elementary_wall_count(&self) -> usize {
        self.walls.iter().map(|w| w.func.coeffs.iter().filter(|c| !c.is_zero()).count()).sum()
    }

    /// Random closed polygon winding once around the origin of the unfrozen
    /// plane, with rational vertices over prime denominators.
    pub fn sample_loop<R: Rng>(rng: &mut R) -> Vec<Vec<BigRational>> {
        const DENOMS: [i64; 8] = [997, 1009, 1013, 1019, 1021, 1031, 1033, 1039];
        loop {
            let k = rng.gen_range(3..=7);
            let mut pts: Vec<Vec<BigRational>> = (0..k)
                .map(|_| {
                    (0..2)
                        .map(|_| {
                            let a = rng.gen_range(1..=1000) * if rng.gen_bool(0.5) { 1 } else { -1 };
                            rat_frac(a, DENOMS[rng.gen_range(0..DENOMS.len())])
                        })
                        .collect()
                })
                .collect();
            pts.sort_by(|a, b| angle(a).total_cmp(&angle(b)));
            let ok = (0..k).all(|i| {
                let (p, q) = (&pts[i], &pts[(i + 1) % k]);
                (&p[0] * &q[1] - &p[1] * &q[0]).is_positive()
            });
            if ok {
                pts.push(pts[0].clone());
                return pts;
            }
        }
    }

    /// Walls whose normal meets `F` become trivial under the term filter and are
    /// dropped; the others are kept unchanged.
    pub fn freeze_pushforward(&self, spec: &FreezeSpec) -> Self {
        let walls = self
            .walls
            .iter()
            .filter(|w| !spec.kills(&self.seed, &w.normal))
            .cloned()
            .collect();
        Self { walls, ..self.clone() }
    }

    /// Generators of a wall support in `R^I`.
    pub fn generators(&self, w: &Wall) -> Vec<Vec<BigRational>> {
        let n = self.seed.n();
        let uf = self.seed.unfrozen();
        let lift = |v: &[BigRational]| {
            let mut out = vec![BigRational::zero(); n];
            for (p, &k) in uf.iter().enumerate() {
                out[k] = v[p].clone();
            }
            out
        };
        let mut gens = Vec::new();
        match &w.shape {
            Shape::Ray(u) => gens.push(lift(u)),
            Shape::Line => {
                if uf.len() == 2 {
                    let v = vec![rat(w.normal[1]) * &w.inv_d[1], -rat(w.normal[0]) * &w.inv_d[0]];
                    let mv: Vec<BigRational> = v.iter().map(|x| -x).collect();
                    gens.push(lift(&v));
                    gens.push(lift(&mv));
                }
            }
        }
        for j in self.seed.frozen() {
            let mut e = vec![BigRational::zero(); n];
            e[j] = rat(1);
            gens.push(e.clone());
            e[j] = rat(-1);
            gens.push(e);
        }
        gens
    }

    pub fn to_json(&self) -> Value {
        let walls: Vec<Value> = self
            .walls
            .iter()
            .map(|w| {
                let gens: Vec<Vec<String>> =
                    self.generators(w).iter().map(|g| g.iter().map(|x| x.to_string()).collect()).collect();
                json!({
                    "normal": w.normal,
                    "generators": gens,
                    "fn": w.func.to_map(),
                    "incoming": w.incoming,
                })
            })
            .collect();
        json!({ "order": self.order, "rank": self.rank(), "walls": walls })
    }

    /// Drawing of the unfrozen plane (rank 2 only).
    pub fn to_svg(&self) -> String {
        let size = 400.0;
        let c = size / 2.0;
        let reach = 180.0;
        let mut s = String::new();
        let _ = writeln!(s, "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{size}\" height=\"{size}\" viewBox=\"0 0 {size} {size}\">");
        let _ = writeln!(s, "<rect width=\"{size}\" height=\"{size}\" fill=\"white\"/>");
        if self.rank() == 2 {
            for w in &self.walls {
                let dir: (f64, f64) = match &w.shape {
                    Shape::Ray(u) => (to_f64(&u[0]), to_f64(&u[1])),
                    Shape::Line => {
                        let v = vec![rat(w.normal[1]) * &w.inv_d[1], -rat(w.normal[0]) * &w.inv_d[0]];
                        (to_f64(&v[0]), to_f64(&v[1]))
                    }
                };
                let len = (dir.0 * dir.0 + dir.1 * dir.1).sqrt();
                let (dx, dy) = (dir.0 / len * reach, -dir.1 / len * reach);
                let (x0, y0) = if matches!(w.shape, Shape::Line) { (c - dx, c - dy) } else { (c, c) };
                let colour = if w.incoming { "black" } else { "steelblue" };
                let _ = writeln!(
                    s,
                    "<line x1=\"{x0:.2}\" y1=\"{y0:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"{colour}\"/>",
                    c + dx,
                    c + dy
                );
                let _ = writeln!(
                    s,
                    "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"10\">{}</text>",
                    c + dx * 1.02,
                    c + dy * 1.02,
                    w.normal
                );
            }
        }
        s.push_str("</svg>\n");
        s
    }
}

fn angle(p: &[BigRational]) -> f64 {
    to_f64(&p[1]).atan2(to_f64(&p[0]))
}

fn to_f64(q: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    q.to_f64().unwrap_or(0.0)
}
