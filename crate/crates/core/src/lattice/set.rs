use crate::error::{Error, Result};

use super::boxes::{Coord, LatticeBox};

/// A subset of `N^n` known exactly inside a box.
///
/// The set asserts nothing about points outside its box. Points are kept as
/// row-major indices of the box, which sort in lexicographic order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BoxSet {
    bounds: LatticeBox,
    indices: Vec<u64>,
}

impl BoxSet {
    /// Builds a set from points that must all lie in `bounds`.
    pub fn new<I, P>(bounds: LatticeBox, points: I) -> Result<Self>
    where
        I: IntoIterator<Item = P>,
        P: AsRef<[Coord]>,
    {
        let mut indices = Vec::new();
        for p in points {
            let p = p.as_ref();
            bounds.expect_dim(p.len())?;
            if !bounds.contains(p) {
                return Err(Error::OutsideBox {
                    point: p.to_vec(),
                    bounds: bounds.bounds().to_vec(),
                });
            }
            indices.push(bounds.encode(p));
        }
        Ok(Self::from_indices(bounds, indices))
    }

    /// Builds a set from points, silently dropping those outside `bounds`.
    pub fn clipped<I, P>(bounds: LatticeBox, points: I) -> Result<Self>
    where
        I: IntoIterator<Item = P>,
        P: AsRef<[Coord]>,
    {
        let mut indices = Vec::new();
        for p in points {
            let p = p.as_ref();
            bounds.expect_dim(p.len())?;
            if bounds.contains(p) {
                indices.push(bounds.encode(p));
            }
        }
        Ok(Self::from_indices(bounds, indices))
    }

    pub(crate) fn from_indices(bounds: LatticeBox, mut indices: Vec<u64>) -> Self {
        indices.sort_unstable();
        indices.dedup();
        BoxSet { bounds, indices }
    }

    /// Like [`BoxSet::from_indices`] but reports the first repeated index.
    pub(crate) fn from_distinct_indices(bounds: LatticeBox, mut indices: Vec<u64>) -> Result<Self> {
        indices.sort_unstable();
        if let Some(w) = indices.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::NotBinary {
                point: bounds.decode(w[0]),
            });
        }
        Ok(BoxSet { bounds, indices })
    }

    pub fn empty(bounds: LatticeBox) -> Self {
        BoxSet {
            bounds,
            indices: Vec::new(),
        }
    }

    /// `{0}` inside `bounds`.
    pub fn origin(bounds: LatticeBox) -> Self {
        BoxSet {
            bounds,
            indices: vec![0],
        }
    }

    /// Every point of `bounds`.
    pub fn full(bounds: LatticeBox) -> Result<Self> {
        let cells = bounds.enumerable_cells()?;
        Ok(BoxSet {
            bounds,
            indices: (0..cells).collect(),
        })
    }

    pub fn from_predicate(bounds: LatticeBox, mut keep: impl FnMut(&[Coord]) -> bool) -> Result<Self> {
        let cells = bounds.enumerable_cells()?;
        let mut point = vec![0; bounds.dim()];
        let mut indices = Vec::new();
        for index in 0..cells {
            bounds.decode_into(index, &mut point);
            if keep(&point) {
                indices.push(index);
            }
        }
        Ok(BoxSet { bounds, indices })
    }

    /// A one-dimensional set `{v in values : v < bound}`.
    pub fn line(bound: Coord, values: impl IntoIterator<Item = Coord>) -> Result<Self> {
        let bounds = LatticeBox::new(vec![bound])?;
        let indices = values.into_iter().filter(|&v| v < bound).collect();
        Ok(Self::from_indices(bounds, indices))
    }

    pub fn bounds(&self) -> &LatticeBox {
        &self.bounds
    }

    pub fn dim(&self) -> usize {
        self.bounds.dim()
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn point(&self, i: usize) -> Vec<Coord> {
        self.bounds.decode(self.indices[i])
    }

    /// Points in lexicographic order.
    pub fn iter(&self) -> impl ExactSizeIterator<Item = Vec<Coord>> + '_ {
        self.indices.iter().map(move |&i| self.bounds.decode(i))
    }

    /// Points as one flat coordinate vector, `dim` entries per point.
    pub fn flat_coords(&self) -> Vec<Coord> {
        let dim = self.dim();
        let mut flat = vec![0; dim * self.len()];
        for (chunk, &index) in flat.chunks_exact_mut(dim.max(1)).zip(&self.indices) {
            self.bounds.decode_into(index, chunk);
        }
        flat
    }

    pub fn contains(&self, point: &[Coord]) -> bool {
        self.bounds.contains(point) && self.indices.binary_search(&self.bounds.encode(point)).is_ok()
    }

    /// Values of a one-dimensional set.
    pub fn values(&self) -> &[u64] {
        debug_assert_eq!(self.dim(), 1);
        &self.indices
    }

    /// Restriction to a smaller box.
    pub fn restrict(&self, bounds: &LatticeBox) -> Result<Self> {
        if !self.bounds.contains_box(bounds) {
            return Err(Error::BoxNotContained {
                inner: bounds.bounds().to_vec(),
                outer: self.bounds.bounds().to_vec(),
            });
        }
        if bounds == &self.bounds {
            return Ok(self.clone());
        }
        let mut point = vec![0; self.dim()];
        let mut indices = Vec::new();
        for &i in &self.indices {
            self.bounds.decode_into(i, &mut point);
            if bounds.contains(&point) {
                indices.push(bounds.encode(&point));
            }
        }
        // Lexicographic order survives re-encoding in a sub-box.
        Ok(BoxSet {
            bounds: bounds.clone(),
            indices,
        })
    }

    /// `A x B` on the concatenated box.
    pub fn cartesian(&self, other: &BoxSet) -> Result<Self> {
        let mut bounds = self.bounds.bounds().to_vec();
        bounds.extend_from_slice(other.bounds.bounds());
        let bounds = LatticeBox::new(bounds)?;
        let width = other.bounds.cells();
        let mut indices = Vec::with_capacity(self.len() * other.len());
        for &a in &self.indices {
            for &b in &other.indices {
                indices.push(a * width + b);
            }
        }
        Ok(BoxSet { bounds, indices })
    }

    /// Projection `{ (t_{axes[0]}, ..., t_{axes[k-1]}) : t in A }`.
    pub fn project(&self, axes: &[usize]) -> Result<Self> {
        check_axes(&self.bounds, axes)?;
        let target = self.bounds.select(axes)?;
        let mut point = vec![0; self.dim()];
        let mut image = vec![0; axes.len()];
        let mut indices = Vec::with_capacity(self.len());
        for &i in &self.indices {
            self.bounds.decode_into(i, &mut point);
            for (slot, &a) in image.iter_mut().zip(axes) {
                *slot = point[a];
            }
            indices.push(target.encode(&image));
        }
        Ok(Self::from_indices(target, indices))
    }

    /// Points vanishing off `axes`, re-indexed to the face: `rho(A ∩ Q)`.
    pub fn face(&self, axes: &[usize]) -> Result<Self> {
        check_axes(&self.bounds, axes)?;
        let target = self.bounds.select(axes)?;
        let mut on_face = vec![false; self.dim()];
        for &a in axes {
            on_face[a] = true;
        }
        let mut point = vec![0; self.dim()];
        let mut image = vec![0; axes.len()];
        let mut indices = Vec::new();
        for &i in &self.indices {
            self.bounds.decode_into(i, &mut point);
            if point.iter().zip(&on_face).any(|(&p, &keep)| !keep && p != 0) {
                continue;
            }
            for (slot, &a) in image.iter_mut().zip(axes) {
                *slot = point[a];
            }
            indices.push(target.encode(&image));
        }
        Ok(Self::from_indices(target, indices))
    }

    /// `{ t : t e_axis in A }` as a one-dimensional set on `[0, M_axis)`.
    pub fn axis_section(&self, axis: usize) -> Result<Self> {
        self.face(&[axis])
    }

    /// Places the set on `axes` of a larger box, zero elsewhere. Inverse of [`BoxSet::face`].
    pub fn embed(&self, axes: &[usize], bounds: &LatticeBox) -> Result<Self> {
        self.bounds.expect_dim(axes.len())?;
        check_axes(bounds, axes)?;
        let mut point = vec![0; self.dim()];
        let mut image = vec![0; bounds.dim()];
        let mut indices = Vec::with_capacity(self.len());
        for &i in &self.indices {
            self.bounds.decode_into(i, &mut point);
            for (&a, &p) in axes.iter().zip(&point) {
                image[a] = p;
            }
            if bounds.contains(&image) {
                indices.push(bounds.encode(&image));
            }
        }
        Ok(Self::from_indices(bounds.clone(), indices))
    }

    /// Monomial substitution `x_i -> y^{images[i]}` restricted to `target`.
    ///
    /// Fails with [`Error::BoxNotContained`] when the source box is too small for the
    /// image to be complete on `target`, and with [`Error::NotBinary`] when two source
    /// points land on the same target point.
    pub fn substitute(&self, images: &[Vec<Coord>], target: LatticeBox) -> Result<Self> {
        self.bounds.expect_dim(images.len())?;
        for w in images {
            target.expect_dim(w.len())?;
        }
        for (axis, w) in images.iter().enumerate() {
            let needed = preimage_bound(w, target.bounds());
            match needed {
                Some(needed) if needed > self.bounds.bound(axis) => {
                    return Err(Error::BoxNotContained {
                        inner: vec![needed],
                        outer: vec![self.bounds.bound(axis)],
                    })
                }
                None if self.bounds.bound(axis) != 1 && !target.bounds().is_empty()
                    // A zero image hides the source coordinate entirely.
                    && self.indices.iter().any(|&i| self.bounds.decode(i)[axis] != 0) => {
                        return Err(Error::InvalidArgument(format!(
                            "axis {axis} is mapped to the zero vector"
                        )));
                    }
                _ => {}
            }
        }
        let mut point = vec![0; self.dim()];
        let mut image = vec![0 as Coord; target.dim()];
        let mut out = Vec::with_capacity(self.len());
        'points: for &i in &self.indices {
            self.bounds.decode_into(i, &mut point);
            image.iter_mut().for_each(|c| *c = 0);
            for (&t, w) in point.iter().zip(images) {
                if t == 0 {
                    continue;
                }
                for (slot, &wj) in image.iter_mut().zip(w) {
                    let add = t.checked_mul(wj).ok_or(Error::Overflow("monomial image"))?;
                    *slot = (*slot).checked_add(add).ok_or(Error::Overflow("monomial image"))?;
                }
            }
            if !target.contains(&image) {
                continue 'points;
            }
            out.push(target.encode(&image));
        }
        Self::from_distinct_indices(target, out)
    }

    /// `A * a = { k a : k in A }` for a one-dimensional `A`.
    ///
    /// The output box is `a_j * M` on axes with `a_j > 0` and 1 elsewhere.
    pub fn scale_line(&self, a: &[Coord]) -> Result<Self> {
        self.bounds.expect_dim(1)?;
        if a.is_empty() || a.iter().all(|&x| x == 0) {
            return Err(Error::InvalidArgument("scale_line needs a nonzero vector".into()));
        }
        let m = self.bounds.bound(0);
        let bounds = a
            .iter()
            .map(|&x| if x == 0 { Ok(1) } else { x.checked_mul(m).ok_or(Error::Overflow("scale_line box")) })
            .collect::<Result<Vec<_>>>()?;
        self.substitute(&[a.to_vec()], LatticeBox::new(bounds)?)
    }

    /// `x_axis -> x_axis^factor`; the output box is `factor * M_axis` on that axis.
    pub fn dilate(&self, axis: usize, factor: Coord) -> Result<Self> {
        self.bounds.check_axis(axis)?;
        if factor == 0 {
            return Err(Error::InvalidArgument("dilation factor must be positive".into()));
        }
        let bound = self
            .bounds
            .bound(axis)
            .checked_mul(factor)
            .ok_or(Error::Overflow("dilated box"))?;
        let target = self.bounds.with_bound(axis, bound)?;
        let images = (0..self.dim())
            .map(|i| {
                let mut e = vec![0; self.dim()];
                e[i] = if i == axis { factor } else { 1 };
                e
            })
            .collect::<Vec<_>>();
        self.substitute(&images, target)
    }

    /// `A + B` restricted to `bounds`, failing on the first repeated sum.
    ///
    /// Both operand boxes must contain `bounds`, which makes the result exact there.
    pub fn minkowski_sum(&self, other: &BoxSet, bounds: &LatticeBox) -> Result<Self> {
        for operand in [self, other] {
            bounds.expect_dim(operand.dim())?;
            if !operand.bounds.contains_box(bounds) {
                return Err(Error::BoxNotContained {
                    inner: bounds.bounds().to_vec(),
                    outer: operand.bounds.bounds().to_vec(),
                });
            }
        }
        let dim = bounds.dim();
        let left = self.restrict(bounds)?.flat_coords();
        let right = other.restrict(bounds)?.flat_coords();
        let mut out = Vec::with_capacity(self.len().max(other.len()));
        let mut sum = vec![0; dim];
        for a in left.chunks_exact(dim) {
            'right: for b in right.chunks_exact(dim) {
                for j in 0..dim {
                    let s = a[j] + b[j];
                    if s >= bounds.bound(j) {
                        if j == 0 {
                            // `right` is sorted on the first coordinate.
                            break 'right;
                        }
                        continue 'right;
                    }
                    sum[j] = s;
                }
                out.push(bounds.encode(&sum));
            }
        }
        Self::from_distinct_indices(bounds.clone(), out)
    }

    /// Renumbers axes: axis `i` of the result is axis `order[i]` of `self`.
    pub fn permute(&self, order: &[usize]) -> Result<Self> {
        if order.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: order.len(),
            });
        }
        self.project(order)
    }
}

/// Smallest source bound that makes `x -> y^w` complete on `target`, or `None` for `w = 0`.
fn preimage_bound(w: &[Coord], target: &[Coord]) -> Option<Coord> {
    w.iter()
        .zip(target)
        .filter(|(&wj, _)| wj > 0)
        .map(|(&wj, &m)| m.div_ceil(wj))
        .min()
}

fn check_axes(bounds: &LatticeBox, axes: &[usize]) -> Result<()> {
    let mut seen = vec![false; bounds.dim()];
    for &a in axes {
        bounds.check_axis(a)?;
        if std::mem::replace(&mut seen[a], true) {
            return Err(Error::InvalidArgument(format!("axis {a} listed twice")));
        }
    }
    if axes.is_empty() {
        return Err(Error::InvalidArgument("empty axis list".into()));
    }
    Ok(())
}

/// The staircase `L_a = N^m \ (N^m + a)` restricted to `bounds`.
pub fn l_set(a: &[Coord], bounds: &LatticeBox) -> Result<BoxSet> {
    bounds.expect_dim(a.len())?;
    if a.contains(&0) {
        return Err(Error::InvalidArgument(format!(
            "L_a needs every entry of a positive, got {a:?}"
        )));
    }
    BoxSet::from_predicate(bounds.clone(), |z| z.iter().zip(a).any(|(z, a)| z < a))
}
