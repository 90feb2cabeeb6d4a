"""Exact rational polyhedral geometry.

All regions are represented over Q.  An H-representation is a list of pairs
(a, b) with a a primitive integer normal and b rational, meaning a.x >= b.
A V-representation is a list of rational vertices plus primitive integer
recession rays; lower dimensional or non-pointed regions are encoded with
equality pairs of inequalities and +/- pairs of rays, so that canonical form
is always a plain (sorted, irredundant) pair of lists and region equality is
representation equality.

The engine is an incremental double description conversion for pointed cones,
wrapped with a lineality-space quotient for the general case and a
homogenization step for polyhedra.  The empty region is a first class
canonical value, never an error.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction

from .errors import DegenerateRayError, DimensionMismatchError

Frac = Fraction

INFINITE_DISTANCE = math.inf


# ---------------------------------------------------------------------------
# vector and matrix helpers (tuples over int / Fraction)
# ---------------------------------------------------------------------------

def vdot(a, b):
    return sum(x * y for x, y in zip(a, b))


def vadd(a, b):
    return tuple(x + y for x, y in zip(a, b))


def vsub(a, b):
    return tuple(x - y for x, y in zip(a, b))


def vscale(c, a):
    return tuple(c * x for x in a)


def vneg(a):
    return tuple(-x for x in a)


def is_zero_vector(a):
    return all(x == 0 for x in a)


def as_fraction_vector(a):
    return tuple(Fraction(x) for x in a)


def primitive(vec):
    """Scale a rational vector to a primitive integer vector (content 1).

    Zero stays zero.  The sign of the vector is preserved.
    """
    fracs = [Fraction(x) for x in vec]
    den = 1
    for x in fracs:
        den = den * x.denominator // math.gcd(den, x.denominator)
    ints = [int(x * den) for x in fracs]
    g = 0
    for x in ints:
        g = math.gcd(g, abs(x))
    if g == 0:
        return tuple(0 for _ in ints)
    return tuple(x // g for x in ints)


def sign_normalized(vec):
    """Primitive vector with its first nonzero entry positive."""
    p = primitive(vec)
    for x in p:
        if x != 0:
            return p if x > 0 else vneg(p)
    return p


def mat_vec(mat, vec):
    return tuple(vdot(row, vec) for row in mat)


def mat_mul(a, b):
    bt = list(zip(*b))
    return tuple(tuple(vdot(row, col) for col in bt) for row in a)


def identity_matrix(n):
    return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))


def transpose(mat):
    return tuple(zip(*mat))


def rref(rows):
    """Reduced row echelon form over Q.  Returns (rref_rows, pivot_columns)."""
    m = [list(map(Fraction, r)) for r in rows]
    nrows = len(m)
    ncols = len(m[0]) if nrows else 0
    pivots = []
    r = 0
    for c in range(ncols):
        pivot = next((i for i in range(r, nrows) if m[i][c] != 0), None)
        if pivot is None:
            continue
        m[r], m[pivot] = m[pivot], m[r]
        pv = m[r][c]
        m[r] = [x / pv for x in m[r]]
        for i in range(nrows):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return [tuple(row) for row in m], pivots


def matrix_rank(rows):
    if not rows:
        return 0
    return len(rref(rows)[1])


def kernel_basis(rows, ncols):
    """Primitive integer basis of {x : rows . x = 0}, deterministic order."""
    if not rows:
        return [tuple(1 if i == j else 0 for j in range(ncols)) for i in range(ncols)]
    red, pivots = rref(rows)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        vec = [Fraction(0)] * ncols
        vec[f] = Fraction(1)
        for i, p in enumerate(pivots):
            vec[p] = -red[i][f]
        basis.append(primitive(vec))
    return basis


def solve_linear(rows, rhs):
    """One rational solution of rows . x = rhs, or None if inconsistent."""
    ncols = len(rows[0]) if rows else len(rhs) and 0
    aug = [list(map(Fraction, r)) + [Fraction(b)] for r, b in zip(rows, rhs)]
    red, pivots = rref(aug)
    n = len(rows[0]) if rows else 0
    sol = [Fraction(0)] * n
    for i, p in enumerate(pivots):
        if p == n:
            return None
        sol[p] = red[i][n]
    # verify (picks up inconsistencies in zero-pivot rows)
    for r, b in zip(rows, rhs):
        if vdot(r, sol) != Fraction(b):
            return None
    return tuple(sol)


def invert_matrix(mat):
    """Exact inverse of a square rational matrix, or None if singular."""
    n = len(mat)
    aug = [list(map(Fraction, row)) + [Fraction(1) if i == j else Fraction(0) for j in range(n)]
           for i, row in enumerate(mat)]
    red, pivots = rref(aug)
    if pivots != list(range(n)):
        return None
    return tuple(tuple(red[i][n:]) for i in range(n))


def det(mat):
    n = len(mat)
    m = [list(map(Fraction, row)) for row in mat]
    d = Fraction(1)
    for c in range(n):
        pivot = next((i for i in range(c, n) if m[i][c] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != c:
            m[c], m[pivot] = m[pivot], m[c]
            d = -d
        d *= m[c][c]
        inv = 1 / m[c][c]
        for i in range(c + 1, n):
            if m[i][c] != 0:
                f = m[i][c] * inv
                m[i] = [x - f * y for x, y in zip(m[i], m[c])]
    return d


# ---------------------------------------------------------------------------
# Smith normal form
# ---------------------------------------------------------------------------

def smith_normal_form(mat):
    """Smith normal form of an integer matrix.

    Returns (U, D, V) with U @ mat @ V = D, U and V unimodular, D diagonal
    with nonnegative entries and d_i | d_{i+1}.
    """
    rows = len(mat)
    cols = len(mat[0]) if rows else 0
    a = [list(map(int, r)) for r in mat]
    u = [[1 if i == j else 0 for j in range(rows)] for i in range(rows)]
    v = [[1 if i == j else 0 for j in range(cols)] for i in range(cols)]

    def row_op(i, j, c):  # row_i += c*row_j
        a[i] = [x + c * y for x, y in zip(a[i], a[j])]
        u[i] = [x + c * y for x, y in zip(u[i], u[j])]

    def col_op(i, j, c):  # col_i += c*col_j
        for r in a:
            r[i] += c * r[j]
        for r in v:
            r[i] += c * r[j]

    def row_swap(i, j):
        a[i], a[j] = a[j], a[i]
        u[i], u[j] = u[j], u[i]

    def col_swap(i, j):
        for r in a:
            r[i], r[j] = r[j], r[i]
        for r in v:
            r[i], r[j] = r[j], r[i]

    def row_negate(i):
        a[i] = [-x for x in a[i]]
        u[i] = [-x for x in u[i]]

    n = min(rows, cols)
    for s in range(n):
        while True:
            # pivot: nonzero entry of least absolute value in the submatrix
            best = None
            for i in range(s, rows):
                for j in range(s, cols):
                    if a[i][j] != 0 and (best is None or abs(a[i][j]) < abs(a[best[0]][best[1]])):
                        best = (i, j)
            if best is None:
                break
            i, j = best
            if i != s:
                row_swap(s, i)
            if j != s:
                col_swap(s, j)
            if a[s][s] < 0:
                row_negate(s)
            done = True
            for i in range(s + 1, rows):
                if a[i][s] != 0:
                    row_op(i, s, -(a[i][s] // a[s][s]))
                    if a[i][s] != 0:
                        done = False
            for j in range(s + 1, cols):
                if a[s][j] != 0:
                    col_op(j, s, -(a[s][j] // a[s][s]))
                    if a[s][j] != 0:
                        done = False
            if done:
                break
        # clean any residue in the pivot row/column (can appear after ops)
    # enforce the divisibility chain
    for s in range(n):
        for t in range(s + 1, n):
            if a[s][s] == 0 and a[t][t] != 0:
                row_swap(s, t)
                col_swap(s, t)
            if a[s][s] != 0 and a[t][t] % a[s][s] != 0:
                # col_s += col_t, then re-reduce the 2x2 block
                col_op(s, t, 1)
                while a[t][s] != 0:
                    if a[s][s] != 0:
                        q = a[t][s] // a[s][s]
                        row_op(t, s, -q)
                    if a[t][s] != 0:
                        row_swap(s, t)
                while a[s][t] != 0:
                    q = a[s][t] // a[s][s]
                    col_op(t, s, -q)
            if a[s][s] < 0:
                row_negate(s)
            if a[t][t] < 0:
                row_negate(t)
    U = tuple(tuple(r) for r in u)
    D = tuple(tuple(r) for r in a)
    V = tuple(tuple(r) for r in v)
    return U, D, V


def integer_right_inverse(mat):
    """Integer right inverse R with mat @ R = I, or None.

    Exists exactly when the integer matrix is surjective as a map to Z^rows.
    """
    rows = len(mat)
    U, D, V = smith_normal_form(mat)
    for i in range(rows):
        if i >= len(D[0]) or D[i][i] != 1:
            return None
    # mat = U^-1 D V^-1, so R = V D^+ U with D^+ the transposed pseudo-identity
    cols = len(mat[0])
    dplus = tuple(tuple(1 if (i == j and i < rows) else 0 for j in range(rows)) for i in range(cols))
    return mat_mul(mat_mul(V, dplus), U)


# ---------------------------------------------------------------------------
# double description core
# ---------------------------------------------------------------------------

def _initial_independent_rows(rows, dim):
    chosen = []
    chosen_rows = []
    for i, r in enumerate(rows):
        if matrix_rank(chosen_rows + [r]) > len(chosen_rows):
            chosen.append(i)
            chosen_rows.append(r)
            if len(chosen) == dim:
                break
    return chosen


def _dd_pointed(dim, rows):
    """Extremal rays of {x : r.x >= 0 for r in rows}.

    The constraint matrix must have full column rank dim (pointed cone).
    Returns primitive integer rays, sorted.  Insertion order follows the
    fewest-currently-violated-generators rule with lexicographic ties.
    """
    if dim == 0:
        return []
    init = _initial_independent_rows(rows, dim)
    if len(init) < dim:
        raise ValueError("constraint matrix not full rank; quotient first")
    binv = invert_matrix([rows[i] for i in init])
    rays = []
    for j in range(dim):
        col = tuple(binv[i][j] for i in range(dim))
        rays.append(primitive(col))
    processed = list(init)

    def tight_mask(ray):
        mask = 0
        for k, idx in enumerate(processed):
            if vdot(rows[idx], ray) == 0:
                mask |= 1 << k
        return mask

    ray_masks = [tight_mask(r) for r in rays]
    remaining = [i for i in range(len(rows)) if i not in init]
    while remaining:
        # dynamic insertion order: fewest violated generators, ties lex
        best = min(remaining, key=lambda i: (sum(1 for r in rays if vdot(rows[i], r) < 0), rows[i]))
        remaining.remove(best)
        a = rows[best]
        vals = [vdot(a, r) for r in rays]
        pos = [k for k, v in enumerate(vals) if v > 0]
        zer = [k for k, v in enumerate(vals) if v == 0]
        neg = [k for k, v in enumerate(vals) if v < 0]
        if not neg:
            processed.append(best)
            bit = 1 << (len(processed) - 1)
            ray_masks = [m | bit if vals[k] == 0 else m for k, m in enumerate(ray_masks)]
            continue
        new_rays = []
        for p, q in itertools.product(pos, neg):
            common = ray_masks[p] & ray_masks[q]
            adjacent = True
            for t in range(len(rays)):
                if t != p and t != q and (common & ~ray_masks[t]) == 0:
                    adjacent = False
                    break
            if adjacent:
                w = vsub(vscale(vals[p], rays[q]), vscale(vals[q], rays[p]))
                new_rays.append(primitive(w))
        keep = [rays[k] for k in pos + zer] + new_rays
        processed.append(best)
        rays = []
        seen = set()
        for r in keep:
            if r not in seen and not is_zero_vector(r):
                seen.add(r)
                rays.append(r)
        ray_masks = [tight_mask(r) for r in rays]
    return sorted(rays)


def cone_generators(dim, rows):
    """V-description of {x : r.x >= 0}: (extremal rays, lineality basis).

    Handles arbitrary (possibly non-pointed, possibly lower dimensional)
    cones by quotienting out the lineality space first.  Both outputs are
    primitive integer vectors in deterministic order.
    """
    rows = [tuple(r) for r in rows if not is_zero_vector(r)]
    lin = kernel_basis(rows, dim)
    if len(lin) == dim:
        return [], sorted(sign_normalized(v) for v in lin)
    if not lin:
        return _dd_pointed(dim, rows), []
    # complement coordinates: positions not pivotal for the lineality space
    _, kpivots = rref([list(v) for v in lin])
    comp = [c for c in range(dim) if c not in kpivots]
    proj_rows = [tuple(r[c] for c in comp) for r in rows]
    qrays = _dd_pointed(len(comp), proj_rows)
    lifted = []
    for q in qrays:
        x = [0] * dim
        for c, val in zip(comp, q):
            x[c] = val
        lifted.append(primitive(x))
    return sorted(lifted), sorted(sign_normalized(v) for v in lin)


def _vrep_from_generators(dim, rays, lineality):
    out = list(rays)
    for v in lineality:
        out.append(v)
        out.append(vneg(v))
    return sorted(set(out))


# ---------------------------------------------------------------------------
# ConeRep
# ---------------------------------------------------------------------------

class ConeRep:
    """Rational polyhedral cone with canonical dual descriptions.

    h_rows: primitive integer normals a, meaning a.x >= 0.
    v_rays: primitive integer generators; a non-pointed cone carries +/-
    pairs spanning its lineality space.
    """

    def __init__(self, ambient_dim, h_rows, v_rays):
        self.ambient_dim = ambient_dim
        self.h_rows = tuple(h_rows)
        self.v_rays = tuple(v_rays)

    @classmethod
    def from_rows(cls, ambient_dim, rows):
        rows = [primitive(r) for r in rows]
        rays, lin = cone_generators(ambient_dim, rows)
        v = _vrep_from_generators(ambient_dim, rays, lin)
        h = _facet_rows_from_generators(ambient_dim, v)
        return cls(ambient_dim, h, v)

    @classmethod
    def from_rays(cls, ambient_dim, rays):
        rays = [primitive(r) for r in rays if not is_zero_vector(primitive(r))]
        h = _facet_rows_from_generators(ambient_dim, rays)
        erays, lin = cone_generators(ambient_dim, h)
        v = _vrep_from_generators(ambient_dim, erays, lin)
        return cls(ambient_dim, h, v)

    def dual(self):
        """Polar dual {y : y.x >= 0 for all x in cone}."""
        return ConeRep.from_rows(self.ambient_dim, self.v_rays)

    def contains(self, vec):
        return all(vdot(a, vec) >= 0 for a in self.h_rows)

    def contains_interior(self, vec):
        """Strict membership on every facet (interior for full dimensional cones)."""
        return all(vdot(a, vec) > 0 for a in self.h_rows)

    def is_full_dimensional(self):
        if not self.v_rays:
            return self.ambient_dim == 0
        return matrix_rank(list(self.v_rays)) == self.ambient_dim

    def extremal_rays(self):
        """Extremal ray generators (excluding lineality +/- pairs)."""
        rays = [r for r in self.v_rays if vneg(r) not in self.v_rays or r > vneg(r)]
        if any(vneg(r) in self.v_rays for r in self.v_rays):
            # non-pointed: extremality is only defined modulo lineality
            rays = [r for r in self.v_rays]
        return tuple(rays)

    def is_pointed(self):
        return all(vneg(r) not in self.v_rays for r in self.v_rays)

    def __eq__(self, other):
        return (isinstance(other, ConeRep) and self.ambient_dim == other.ambient_dim
                and self.h_rows == other.h_rows and self.v_rays == other.v_rays)

    def __hash__(self):
        return hash((self.ambient_dim, self.h_rows, self.v_rays))

    def __repr__(self):
        return f"ConeRep(dim={self.ambient_dim}, rays={list(self.v_rays)})"


def _facet_rows_from_generators(dim, gens):
    """Canonical irredundant H-rows of cone(gens) (with +/- equality pairs)."""
    if not gens:
        basis = [tuple(1 if i == j else 0 for j in range(dim)) for i in range(dim)]
        rows = []
        for b in basis:
            rows.append(b)
            rows.append(vneg(b))
        return tuple(sorted(rows))
    rays, lin = cone_generators(dim, [tuple(g) for g in gens])
    return tuple(_vrep_from_generators(dim, rays, lin))


def dual_cone(cone):
    return cone.dual()


# ---------------------------------------------------------------------------
# Polyhedron
# ---------------------------------------------------------------------------

class Polyhedron:
    """Canonical rational polyhedron {x : a.x >= b}.

    h_rep is a sorted tuple of (a, b) with a a primitive integer normal and b
    a Fraction; v_rep is (vertices, rays).  The empty polyhedron is canonical
    with the single unsatisfiable row 0.x >= 1.
    """

    def __init__(self, ambient_dim, h_rep, vertices, rays, empty=False):
        self.ambient_dim = ambient_dim
        self.h_rep = tuple(h_rep)
        self.vertices = tuple(vertices)
        self.rays = tuple(rays)
        self._empty = empty

    # -- constructors ------------------------------------------------------

    @classmethod
    def empty(cls, ambient_dim):
        zero = tuple(0 for _ in range(ambient_dim))
        return cls(ambient_dim, ((zero, Frac(1)),), (), (), empty=True)

    @classmethod
    def full_space(cls, ambient_dim):
        return cls.from_inequalities(ambient_dim, [])

    @classmethod
    def from_inequalities(cls, ambient_dim, rows):
        """rows: iterable of (a, b) meaning a.x >= b, rationals allowed."""
        hom = []
        for a, b in rows:
            vec = list(a) + [-Fraction(b)]
            hom.append(_integer_row(vec))
        tpos = tuple([0] * ambient_dim + [1])
        hom.append(tpos)
        gens, lin = cone_generators(ambient_dim + 1, hom)
        return cls._from_homogeneous_generators(ambient_dim, gens, lin)

    @classmethod
    def from_generators(cls, ambient_dim, vertices, rays=()):
        verts = [as_fraction_vector(v) for v in vertices]
        if not verts:
            return cls.empty(ambient_dim)
        gens = [_integer_row(list(v) + [1]) for v in verts]
        for r in rays:
            rp = primitive(r)
            if not is_zero_vector(rp):
                gens.append(tuple(list(rp) + [0]))
        h = cls._hrep_from_homogeneous_gens(ambient_dim, gens)
        return cls.from_inequalities(ambient_dim, h)

    @classmethod
    def _from_homogeneous_generators(cls, ambient_dim, gens, lin):
        assert all(v[-1] == 0 for v in lin), "lineality escaped the t=0 slice"
        vertices = []
        rays = []
        for g in gens:
            if g[-1] > 0:
                t = Fraction(g[-1])
                vertices.append(tuple(Fraction(x) / t for x in g[:-1]))
            elif g[-1] == 0:
                rays.append(primitive(g[:-1]))
        if not vertices:
            return cls.empty(ambient_dim)
        for v in lin:
            r = primitive(v[:-1])
            rays.append(r)
            rays.append(vneg(r))
        rays = sorted({r for r in rays if not is_zero_vector(r)})
        hom_gens = [_integer_row(list(v) + [1]) for v in vertices]
        hom_gens += [tuple(list(r) + [0]) for r in rays]
        h = cls._hrep_from_homogeneous_gens(ambient_dim, hom_gens)
        return cls(ambient_dim, h, tuple(sorted(vertices)), tuple(rays))

    @staticmethod
    def _hrep_from_homogeneous_gens(ambient_dim, hom_gens):
        frays, flin = cone_generators(ambient_dim + 1, hom_gens)
        functionals = list(frays)
        for v in flin:
            functionals.append(v)
            functionals.append(vneg(v))
        rows = []
        for f in functionals:
            a, beta = f[:-1], f[-1]
            if is_zero_vector(a):
                continue
            ap = primitive(a)
            scale = next(Fraction(x, y) for x, y in zip(a, ap) if y != 0)
            rows.append((ap, Fraction(-beta) / scale))
        return sorted(set(rows))

    # -- predicates ---------------------------------------------------------

    def is_empty(self):
        return self._empty

    def is_bounded(self):
        return not self._empty and not self.rays

    def contains_point(self, x):
        if self._empty:
            return False
        return all(vdot(a, x) >= b for a, b in self.h_rep)

    def contains_point_interior(self, x):
        if self._empty:
            return False
        return all(vdot(a, x) > b for a, b in self.h_rep)

    def recession_contains(self, r):
        if self._empty:
            return False
        return all(vdot(a, r) >= 0 for a, _ in self.h_rep)

    def dim(self):
        """Dimension of the polyhedron (-1 for empty)."""
        if self._empty:
            return -1
        dirs = [vsub(v, self.vertices[0]) for v in self.vertices[1:]]
        dirs += [as_fraction_vector(r) for r in self.rays]
        if not dirs:
            return 0
        return matrix_rank(dirs)

    # -- transforms ---------------------------------------------------------

    def translate(self, v):
        if self._empty:
            return self
        rows = [(a, b + vdot(a, v)) for a, b in self.h_rep]
        return Polyhedron.from_inequalities(self.ambient_dim, rows)

    def scale_rhs(self, factor):
        """Image of the polyhedron under x -> factor*x (factor > 0)."""
        if self._empty:
            return self
        rows = [(a, Fraction(factor) * b) for a, b in self.h_rep]
        return Polyhedron.from_inequalities(self.ambient_dim, rows)

    def recession_cone(self):
        return ConeRep.from_rows(self.ambient_dim, [a for a, _ in self.h_rep])

    def bounding_box(self):
        if self._empty or self.rays:
            return None
        lo = tuple(min(v[i] for v in self.vertices) for i in range(self.ambient_dim))
        hi = tuple(max(v[i] for v in self.vertices) for i in range(self.ambient_dim))
        return lo, hi

    def lattice_points(self):
        """All integer points (requires boundedness)."""
        if self._empty:
            return []
        if self.rays:
            raise ValueError("lattice_points requires a bounded polyhedron")
        lo, hi = self.bounding_box()
        ranges = [range(math.ceil(l), math.floor(h) + 1) for l, h in zip(lo, hi)]
        return [pt for pt in itertools.product(*ranges) if self.contains_point(pt)]

    def __eq__(self, other):
        return (isinstance(other, Polyhedron) and self.ambient_dim == other.ambient_dim
                and self.h_rep == other.h_rep and self._empty == other._empty)

    def __hash__(self):
        return hash((self.ambient_dim, self.h_rep, self._empty))

    def __repr__(self):
        if self._empty:
            return f"Polyhedron(empty, dim={self.ambient_dim})"
        return (f"Polyhedron(dim={self.ambient_dim}, vertices={len(self.vertices)},"
                f" rays={len(self.rays)}, facets={len(self.h_rep)})")


def _scale_to_integer(vec):
    den = 1
    for x in vec:
        f = Fraction(x)
        den = den * f.denominator // math.gcd(den, f.denominator)
    return tuple(int(Fraction(x) * den) for x in vec)


def _integer_row(vec):
    """Clear denominators of a rational row (keeps direction, integer output)."""
    den = 1
    for x in vec:
        f = Fraction(x)
        den = den * f.denominator // math.gcd(den, f.denominator)
    ints = tuple(int(Fraction(x) * den) for x in vec)
    g = 0
    for x in ints:
        g = math.gcd(g, abs(x))
    if g > 1:
        ints = tuple(x // g for x in ints)
    return ints


# ---------------------------------------------------------------------------
# region operations
# ---------------------------------------------------------------------------

def convert(region):
    """Return the region with both canonical representations computed.

    Constructors already canonicalize, so this is the identity on Polyhedron
    and ConeRep built through the public API; it re-canonicalizes raw input.
    """
    if isinstance(region, ConeRep):
        return ConeRep.from_rows(region.ambient_dim, region.h_rows) if region.h_rows \
            else ConeRep.from_rays(region.ambient_dim, region.v_rays)
    if region.is_empty():
        return region
    return Polyhedron.from_inequalities(region.ambient_dim, region.h_rep)


def intersect(p, q):
    if p.ambient_dim != q.ambient_dim:
        raise DimensionMismatchError(
            f"ambient dimensions differ: {p.ambient_dim} vs {q.ambient_dim}")
    if p.is_empty():
        return p
    if q.is_empty():
        return q
    return Polyhedron.from_inequalities(p.ambient_dim, list(p.h_rep) + list(q.h_rep))


def affine_preimage(p, matrix, offset):
    """{x : matrix.x + offset in p}; matrix maps source space into p's space."""
    if matrix and len(matrix[0]) and len(matrix) != p.ambient_dim:
        raise DimensionMismatchError("matrix target dimension must match the region")
    source_dim = len(matrix[0]) if matrix else 0
    if p.is_empty():
        return Polyhedron.empty(source_dim)
    cols = list(zip(*matrix)) if matrix else []
    rows = []
    for a, c in p.h_rep:
        new_a = tuple(vdot(a, col) for col in cols)
        rows.append((new_a, Fraction(c) - vdot(a, offset)))
    return Polyhedron.from_inequalities(source_dim, rows)


def min_scale_on_ray(p, v):
    """Least t >= 0 with t*v in p, or None if the ray misses p."""
    if is_zero_vector(v):
        raise DegenerateRayError("direction vector must be nonzero")
    if p.is_empty():
        return None
    lo = Fraction(0)
    hi = None
    for a, b in p.h_rep:
        av = vdot(a, v)
        b = Fraction(b)
        if av > 0:
            lo = max(lo, b / av)
        elif av == 0:
            if b > 0:
                return None
        else:
            bound = b / av
            hi = bound if hi is None else min(hi, bound)
    if hi is not None and lo > hi:
        return None
    return lo


def includes(p, q):
    """True iff q is a subset of p (both Polyhedron, same ambient dim)."""
    if p.ambient_dim != q.ambient_dim:
        raise DimensionMismatchError(
            f"ambient dimensions differ: {p.ambient_dim} vs {q.ambient_dim}")
    if q.is_empty():
        return True
    if p.is_empty():
        return False
    for v in q.vertices:
        if not p.contains_point(v):
            return False
    for r in q.rays:
        if not p.recession_contains(r):
            return False
    return True


# ---------------------------------------------------------------------------
# Box and windowed Hausdorff distance
# ---------------------------------------------------------------------------

class Box:
    """Axis aligned compact window [lo_i, hi_i]."""

    def __init__(self, lo, hi):
        self.lo = as_fraction_vector(lo)
        self.hi = as_fraction_vector(hi)
        if len(self.lo) != len(self.hi):
            raise DimensionMismatchError("box endpoints differ in length")
        if any(l > h for l, h in zip(self.lo, self.hi)):
            raise ValueError("box must satisfy lo <= hi componentwise")

    @property
    def dim(self):
        return len(self.lo)

    def as_polyhedron(self):
        d = self.dim
        rows = []
        for i in range(d):
            e = tuple(1 if j == i else 0 for j in range(d))
            rows.append((e, self.lo[i]))
            rows.append((vneg(e), -self.hi[i]))
        return Polyhedron.from_inequalities(d, rows)

    def max_side(self):
        return max(h - l for l, h in zip(self.lo, self.hi)) if self.dim else Frac(0)

    def __repr__(self):
        return f"Box({list(self.lo)}, {list(self.hi)})"


def _pieces(region):
    if isinstance(region, Polyhedron):
        return [region]
    if hasattr(region, "pieces"):
        return list(region.pieces)
    return list(region)


def _inflation_rows(piece):
    """Rows (a, b, k) so that piece + z*[-1,1]^d = {x : a.x >= b - k z}.

    Valid for bounded canonical pieces: the facet normals of a Minkowski sum
    with a box are among the piece normals and the coordinate directions.
    """
    d = piece.ambient_dim
    rows = [(a, Fraction(b), sum(abs(x) for x in a)) for a, b in piece.h_rep]
    for i in range(d):
        e = tuple(1 if j == i else 0 for j in range(d))
        lo = min(v[i] for v in piece.vertices)
        hi = max(v[i] for v in piece.vertices)
        rows.append((e, Fraction(lo), 1))
        rows.append((vneg(e), Fraction(-hi), 1))
    return rows


def _directed_hausdorff(sources, targets, zcap):
    """sup over the source pieces of the L-inf distance to the target union.

    Computed exactly by lifting to (x, z) space: a point x keeps distance
    >= z from a target piece T iff it violates some facet of T inflated by z.
    The feasible (x, z) set is a finite union of polyhedra; the answer is the
    maximal z coordinate over their vertices.
    """
    best = Frac(0)
    target_rows = [_inflation_rows(t) for t in targets]
    for src in sources:
        d = src.ambient_dim
        base_rows = [(tuple(a) + (0,), Fraction(b)) for a, b in src.h_rep]
        zvec = tuple([0] * d + [1])
        base_rows.append((zvec, Frac(0)))
        base_rows.append((vneg(zvec), -Fraction(zcap)))
        cells = [base_rows]
        for rows in target_rows:
            new_cells = []
            for cell in cells:
                for a, b, k in rows:
                    cut = cell + [((tuple(-x for x in a) + (-k,)), -b)]
                    poly = Polyhedron.from_inequalities(d + 1, cut)
                    if not poly.is_empty():
                        new_cells.append(list(poly.h_rep))
            # dedupe cells by canonical form
            seen = set()
            cells = []
            for c in new_cells:
                key = tuple(c)
                if key not in seen:
                    seen.add(key)
                    cells.append(c)
        for cell in cells:
            poly = Polyhedron.from_inequalities(d + 1, cell)
            if poly.is_empty():
                continue
            zmax = max(v[-1] for v in poly.vertices)
            if poly.rays and any(r[-1] > 0 for r in poly.rays):
                raise RuntimeError("unbounded distance cell; window clipping failed")
            best = max(best, zmax)
    return best


def windowed_hausdorff(p, q, window):
    """Exact L-inf Hausdorff distance between the window clippings.

    Both arguments may be a Polyhedron or a union (anything with .pieces or a
    plain sequence of pieces).  Returns a Fraction; 0 if both clippings are
    empty; INFINITE_DISTANCE if exactly one is empty.
    """
    wp = window.as_polyhedron()
    ps = [c for c in (intersect(piece, wp) for piece in _pieces(p)) if not c.is_empty()]
    qs = [c for c in (intersect(piece, wp) for piece in _pieces(q)) if not c.is_empty()]
    if not ps and not qs:
        return Frac(0)
    if not ps or not qs:
        return INFINITE_DISTANCE
    zcap = window.max_side()
    return max(_directed_hausdorff(ps, qs, zcap), _directed_hausdorff(qs, ps, zcap))


def point_region_distance(x, region, window=None):
    """Exact L-inf distance from a point to a region (clipped to a window)."""
    pt = Polyhedron.from_generators(len(x), [x])
    pieces = _pieces(region)
    if window is not None:
        wp = window.as_polyhedron()
        pieces = [c for c in (intersect(piece, wp) for piece in pieces) if not c.is_empty()]
        zcap = window.max_side() + max(
            max(abs(Fraction(xi) - l) for xi, l in zip(x, window.lo)),
            max(abs(Fraction(xi) - h) for xi, h in zip(x, window.hi)))
    else:
        pieces = [c for c in pieces if not c.is_empty()]
        if any(not c.is_bounded() for c in pieces):
            # clip with a generous box around x and the pieces
            span = Frac(1)
            for c in pieces:
                for v in c.vertices:
                    span = max(span, max(abs(vi - Fraction(xi)) for vi, xi in zip(v, x)))
            lo = tuple(Fraction(xi) - 4 * span for xi in x)
            hi = tuple(Fraction(xi) + 4 * span for xi in x)
            wp = Box(lo, hi).as_polyhedron()
            pieces = [c for c in (intersect(piece, wp) for piece in pieces) if not c.is_empty()]
            zcap = 8 * span
        else:
            zcap = Frac(1)
            for c in pieces:
                for v in c.vertices:
                    zcap = max(zcap, max(abs(vi - Fraction(xi)) for vi, xi in zip(v, x)))
    if not pieces:
        return INFINITE_DISTANCE
    return _directed_hausdorff([pt], pieces, zcap)


# ---------------------------------------------------------------------------
# serialization (shared wire format with the command line front end)
# ---------------------------------------------------------------------------

def fraction_to_str(x):
    f = Fraction(x)
    return str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"


def fraction_from_str(s):
    return Fraction(s)


def region_to_dict(p):
    return {
        "ambient_dim": p.ambient_dim,
        "inequalities": [[fraction_to_str(b)] + [fraction_to_str(x) for x in a]
                         for a, b in p.h_rep],
        "vertices": [[fraction_to_str(x) for x in v] for v in p.vertices],
        "rays": [[fraction_to_str(x) for x in r] for r in p.rays],
    }


def region_from_dict(d):
    dim = int(d["ambient_dim"])
    rows = []
    for entry in d["inequalities"]:
        b = fraction_from_str(entry[0])
        a = tuple(fraction_from_str(x) for x in entry[1:])
        if len(a) != dim:
            raise ValueError("inequality length does not match ambient_dim")
        rows.append((a, b))
    return Polyhedron.from_inequalities(dim, rows)
