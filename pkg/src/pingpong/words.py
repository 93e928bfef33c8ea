"""Free-group word machinery: reduced words, Stallings graphs, coset norms,
finite-index completions, and amalgam / HNN normal forms.

Letters are nonzero integers: +i is generator i (1-based), -i its inverse.
Words are tuples of letters with no cancelling adjacent pair.
"""

import itertools
import json

import numpy as np

from .errors import ConfigError, DomainError, SearchBudgetExceeded, ShapeError
from .scalars import Matrix, realify_quat


class GenSet:
    """A marked free generating set with inverse pairing."""

    def __init__(self, labels):
        labels = list(labels)
        if len(set(labels)) != len(labels):
            raise ConfigError("generator labels must be distinct")
        for lab in labels:
            if not (len(lab) == 1 and lab.isalpha()):
                raise ConfigError(f"generator labels must be single letters, got {lab!r}")
        self.labels = labels

    @property
    def rank(self):
        return len(self.labels)

    def __repr__(self):
        return f"GenSet({self.labels})"

    def letter(self, label):
        """Signed letter for 'a' or 'a^-1'."""
        if label.endswith("^-1"):
            return -(self.labels.index(label[:-3]) + 1)
        return self.labels.index(label) + 1

    def letter_label(self, letter):
        base = self.labels[abs(letter) - 1]
        return base if letter > 0 else base + "^-1"

    def alphabet(self):
        """All signed letters, positive first."""
        k = self.rank
        return list(range(1, k + 1)) + list(range(-1, -k - 1, -1))


def reduce_word(letters):
    out = []
    for x in letters:
        if x == 0:
            raise ConfigError("0 is not a letter")
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


def concat(*ws):
    out = []
    for w in ws:
        for x in w:
            if out and out[-1] == -x:
                out.pop()
            else:
                out.append(x)
    return tuple(out)


def inverse(w):
    return tuple(-x for x in reversed(w))


def parse_word(gens, text):
    """Parse strings like 'bab^-1' (single-letter labels, ^-1 suffixes)."""
    letters = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if not ch.isalpha() or ch not in gens.labels:
            raise ConfigError(f"unknown generator {ch!r} in {text!r}")
        idx = gens.labels.index(ch) + 1
        if text[i + 1:i + 4] == "^-1":
            letters.append(-idx)
            i += 4
        else:
            letters.append(idx)
            i += 1
    return reduce_word(letters)


def word_str(gens, w):
    return "".join(gens.letter_label(x) for x in w) if w else "1"


def enumerate_reduced(gens, max_len):
    """Yield every reduced word of length <= max_len exactly once (by length)."""
    yield ()
    frontier = [()]
    alphabet = gens.alphabet()
    for _ in range(max_len):
        new = []
        for w in frontier:
            for x in alphabet:
                if w and w[-1] == -x:
                    continue
                nw = w + (x,)
                new.append(nw)
                yield nw
        frontier = new


def count_reduced(rank, length):
    """Number of reduced words of exactly this length: 2k (2k-1)^{l-1}."""
    if length == 0:
        return 1
    return 2 * rank * (2 * rank - 1) ** (length - 1)


# ----------------------------------------------------------------------
# Stallings graphs


class StallingsGraph:
    """Folded labeled graph of a finitely generated subgroup of a free group.

    transitions[(v, x)] = w means an x-labeled edge v -> w; inverse edges
    are stored explicitly so reading any reduced word is deterministic.
    """

    def __init__(self, gens, generator_words):
        self.gens = gens
        self.base = 0
        self._next = 1
        self._edges = []  # (v, x, w) with x > 0
        self._parent = {0: 0}
        for w in generator_words:
            self._add_loop(w)
        self._fold()

    # union-find over vertices
    def _find(self, v):
        while self._parent[v] != v:
            self._parent[v] = self._parent[self._parent[v]]
            v = self._parent[v]
        return v

    def _union(self, a, b):
        ra, rb = self._find(a), self._find(b)
        if ra == rb:
            return ra
        if rb == self._find(self.base):
            ra, rb = rb, ra
        self._parent[rb] = ra
        return ra

    def _new_vertex(self):
        v = self._next
        self._next += 1
        self._parent[v] = v
        return v

    def _add_edge(self, a, x, b):
        if x < 0:
            a, x, b = b, -x, a
        self._edges.append((a, x, b))

    def _add_loop(self, w):
        if not w:
            return
        cur = self.base
        for x in w[:-1]:
            nxt = self._new_vertex()
            self._add_edge(cur, x, nxt)
            cur = nxt
        self._add_edge(cur, w[-1], self.base)

    def add_hanging_path(self, w):
        """Trace w from the base, adding fresh vertices; then refold."""
        cur = self.base
        for x in w:
            nxt = self.trans.get((cur, x))
            if nxt is None:
                nxt = self._new_vertex()
                self._add_edge(cur, x, nxt)
            cur = nxt
        self._fold()

    def _fold(self):
        while True:
            edges = sorted({(self._find(v), x, self._find(w))
                            for (v, x, w) in self._edges})
            self._edges = list(edges)
            table = {}
            clash = None
            for (v, x, w) in edges:
                for src, lab, tgt in ((v, x, w), (w, -x, v)):
                    if (src, lab) in table and table[(src, lab)] != tgt:
                        clash = (table[(src, lab)], tgt)
                        break
                    table[(src, lab)] = tgt
                if clash:
                    break
            if clash is None:
                self.trans = table
                self._relabel()
                return
            self._union(*clash)

    def _relabel(self):
        verts = sorted({v for (v, _x) in self.trans} | {self._find(self.base)})
        old_base = self._find(self.base)
        order = [old_base] + [v for v in verts if v != old_base]
        new = {v: i for i, v in enumerate(order)}
        self.trans = {(new[v], x): new[w] for (v, x), w in self.trans.items()}
        self._edges = [(v, x, w) for (v, x), w in self.trans.items() if x > 0]
        self._parent = {i: i for i in range(len(order))}
        self._next = len(order)
        self.base = 0

    @property
    def vertices(self):
        vs = {v for (v, _x) in self.trans}
        vs.add(self.base)
        return sorted(vs)

    def read(self, w, start=None):
        """Endpoint of the path reading w, or None if the path leaves the graph."""
        cur = self.base if start is None else start
        for x in w:
            cur = self.trans.get((cur, x))
            if cur is None:
                return None
        return cur

    def accepts(self, w):
        """Membership in the subgroup: the path exists and returns to the base."""
        return self.read(w) == self.base

    def free_basis(self):
        """A free basis of the subgroup from a spanning tree of the core graph."""
        tree_path = {self.base: ()}
        frontier = [self.base]
        tree_edges = set()
        while frontier:
            nxt = []
            for v in frontier:
                for x in self.gens.alphabet():
                    w = self.trans.get((v, x))
                    if w is not None and w not in tree_path:
                        tree_path[w] = tree_path[v] + (x,)
                        tree_edges.add((v, x, w) if x > 0 else (w, -x, v))
                        nxt.append(w)
            frontier = nxt
        basis = []
        for (v, x), w in sorted(self.trans.items()):
            if x < 0 or (v, x, w) in tree_edges:
                continue
            if v not in tree_path or w not in tree_path:
                continue
            word = concat(tree_path[v], (x,), inverse(tree_path[w]))
            if word:
                basis.append(word)
        return basis


class SubgroupSpec:
    """A subgroup given by generator words, with an optional finite-index
    permutation action whose base-point stabilizer is the membership oracle."""

    def __init__(self, gens, generator_words, action=None):
        self.gens = gens
        self.generators = []
        for w in generator_words:
            w = parse_word(gens, w) if isinstance(w, str) else reduce_word(w)
            if w:
                self.generators.append(w)
        self.graph = StallingsGraph(gens, self.generators)
        self.action = action  # dict label -> list (permutation of range(degree))

    def __repr__(self):
        kind = f"index<= {self.degree}" if self.action else "free basis"
        return f"SubgroupSpec({[word_str(self.gens, w) for w in self.generators]}, {kind})"

    @property
    def degree(self):
        if self.action is None:
            return None
        return len(next(iter(self.action.values())))

    @property
    def is_trivial(self):
        return not self.generators and self.action is None

    def _letter_perms(self):
        if not hasattr(self, "_perm_cache"):
            perms = {}
            for i, lab in enumerate(self.gens.labels):
                p = self.action[lab]
                perms[i + 1] = p
                inv = [0] * len(p)
                for a, b in enumerate(p):
                    inv[b] = a
                perms[-(i + 1)] = inv
            self._perm_cache = perms
        return self._perm_cache

    def act(self, w, start=0):
        """Image of a point under the permutation action of the word."""
        if self.action is None:
            raise ConfigError("subgroup has no finite-index action")
        perms = self._letter_perms()
        cur = start
        for x in w:
            cur = perms[x][cur]
        return cur

    def contains(self, w):
        w = reduce_word(w)
        if self.action is not None:
            return self.act(w) == 0
        return self.graph.accepts(w)

    def index_in_cyclic(self, w):
        """Smallest s >= 1 with w^s in the subgroup (None if unbounded search)."""
        if self.action is not None:
            cur, s = 0, 0
            while True:
                cur = self.act(w, start=cur)
                s += 1
                if cur == 0:
                    return s
        for s in range(1, 65):
            if self.contains(reduce_word(w * s)):
                return s
        return None

    def to_json_dict(self):
        d = {"generators": [word_str(self.gens, w) for w in self.generators]}
        if self.action is not None:
            d["action"] = {"degree": self.degree, "perms": dict(sorted(self.action.items()))}
        return d

    @classmethod
    def from_json_dict(cls, gens, d):
        action = None
        if "action" in d:
            action = {k: list(v) for k, v in d["action"]["perms"].items()}
        return cls(gens, d.get("generators", []), action=action)


def coset_norm(w, sub):
    """Minimal word length over the left coset wH (0 iff w is in H)."""
    w = reduce_word(w)
    if sub.contains(w):
        return 0
    if sub.action is not None:
        # v in wH iff the base point lands on the same spot under v^-1 and w^-1
        perms = sub._letter_perms()
        target = sub.act(inverse(w))
        dist = {0: 0}
        frontier = [0]
        depth = 0
        while frontier:
            depth += 1
            nxt = []
            for p in frontier:
                for x in sub.gens.alphabet():
                    q = perms[x][p]
                    if q not in dist:
                        dist[q] = depth
                        nxt.append(q)
                        if q == target:
                            return depth
            frontier = nxt
        raise DomainError("target coset unreachable in the action")
    if len(sub.generators) == 1:
        # cyclic subgroup: |w h^k| >= |h^k| - |w| > |w| once k > 2|w|, so a
        # bounded window of powers contains the minimum
        h = sub.generators[0]
        best = len(w)
        cur_fwd = w
        cur_bwd = w
        for _k in range(2 * len(w) + 1):
            cur_fwd = concat(cur_fwd, h)
            cur_bwd = concat(cur_bwd, inverse(h))
            best = min(best, len(cur_fwd), len(cur_bwd))
        return best
    for v in enumerate_reduced(sub.gens, len(w)):
        if v and sub.contains(concat(inverse(v), w)):
            return len(v)
    return len(w)


def stallings_finite_index(sub, excluded, max_index=4096):
    """Finite-index completion: a permutation action whose point stabilizer
    contains the subgroup and contains none of the excluded words.

    The Stallings graph of the subgroup is extended by hanging paths for
    the excluded words (which end away from the base exactly because the
    words lie outside the subgroup), then every partial letter-injection
    is completed deterministically by smallest available target.
    """
    excluded = [parse_word(sub.gens, w) if isinstance(w, str) else reduce_word(w)
                for w in excluded]
    for w in excluded:
        if sub.contains(w):
            raise DomainError(f"excluded word {w} lies in the subgroup")
    graph = StallingsGraph(sub.gens, sub.generators)
    for w in excluded:
        graph.add_hanging_path(w)
        if graph.read(w) == graph.base:
            raise DomainError(f"excluded word {w} folded into the subgroup")
    verts = graph.vertices
    n = len(verts)
    if n > max_index:
        raise SearchBudgetExceeded(
            f"completion needs degree {n} > budget {max_index}", attempted_index=n)
    action = {}
    for i, lab in enumerate(sub.gens.labels):
        x = i + 1
        perm = [None] * n
        used = set()
        for v in verts:
            w = graph.trans.get((v, x))
            if w is not None:
                perm[v] = w
                used.add(w)
        free_targets = [v for v in verts if v not in used]
        it = iter(free_targets)
        for v in verts:
            if perm[v] is None:
                perm[v] = next(it)
        action[lab] = perm
    out = SubgroupSpec(sub.gens, [word_str(sub.gens, w) for w in sub.generators],
                       action=action)
    # postcondition replay
    for w in sub.generators:
        if not out.contains(w):
            raise DomainError("completion lost a subgroup generator")
    for w in excluded:
        if out.contains(w):
            raise DomainError("completion readmitted an excluded word")
    return out


def whole_group(gens):
    """The trivial finite-index oracle: the whole group (degree-1 action)."""
    return SubgroupSpec(gens, [lab for lab in gens.labels],
                        action={lab: [0] for lab in gens.labels})


# ----------------------------------------------------------------------
# matrix representations


class FreeRep:
    """A map from generator labels to invertible matrices over R, C or H."""

    def __init__(self, gens, images, tol=1e-10):
        self.gens = gens
        self.images = {}
        for lab in gens.labels:
            m = images[lab]
            if not isinstance(m, Matrix):
                arr = np.asarray(m)
                m = Matrix("C" if np.iscomplexobj(arr) else "R", arr)
            if not m.is_square:
                raise ShapeError(f"image of {lab} is not square")
            self.images[lab] = m
        fields = {m.field for m in self.images.values()}
        dims = {m.rows for m in self.images.values()}
        if len(fields) != 1 or len(dims) != 1:
            raise ShapeError("generator images must share field and dimension")
        self.field = fields.pop()
        self.dim = dims.pop()
        self._inv = {}
        for lab, m in self.images.items():
            inv = m.inv()
            if not (m @ inv).close_to(Matrix.identity(self.field, self.dim), tol * 100):
                raise DomainError(f"image of {lab} is numerically singular")
            self._inv[lab] = inv

    def __repr__(self):
        return f"FreeRep({self.gens.labels} -> {self.field}^{self.dim})"

    def letter_matrix(self, letter):
        lab = self.gens.labels[abs(letter) - 1]
        return self.images[lab] if letter > 0 else self._inv[lab]

    def evaluate(self, w):
        out = Matrix.identity(self.field, self.dim)
        for x in reduce_word(w):
            out = out @ self.letter_matrix(x)
        return out

    def linear_arrays(self):
        """Letter -> numpy array over R or C (H images realified)."""
        out = {}
        for x in self.gens.alphabet():
            m = self.letter_matrix(x)
            out[x] = realify_quat(m).array if self.field == "H" else m.array
        return out

    def conjugate(self, g):
        """The representation w -> g rho(w) g^{-1}."""
        ginv = g.inv()
        field = g.field
        images = {}
        for lab, m in self.images.items():
            mm = m
            if m.field == "R" and field == "C":
                mm = Matrix("C", m.array.astype(complex))
            images[lab] = g @ mm @ ginv
        return FreeRep(self.gens, images)

    def transform(self, fn):
        return FreeRep(self.gens, {lab: fn(m) for lab, m in self.images.items()})

    def to_json_dict(self):
        return {"labels": self.gens.labels, "field": self.field, "dim": self.dim,
                "images": {lab: m.to_json_dict() for lab, m in sorted(self.images.items())}}

    @classmethod
    def from_json_dict(cls, d):
        gens = GenSet(d["labels"])
        images = {lab: Matrix.from_json_dict(md) for lab, md in d["images"].items()}
        return cls(gens, images)

    def dump(self, path):
        with open(path, "w") as f:
            json.dump(self.to_json_dict(), f, sort_keys=True, indent=1)

    @classmethod
    def load(cls, path):
        with open(path) as f:
            return cls.from_json_dict(json.load(f))


def words_with_matrices(rep, max_len):
    """Per-length batches (words, stacked matrix array) for lengths 1..max_len.

    Matrices are built incrementally; H representations are realified.
    """
    mats = rep.linear_arrays()
    d = next(iter(mats.values())).shape[0]
    alphabet = rep.gens.alphabet()
    words = [(x,) for x in alphabet]
    arr = np.stack([mats[x] for x in alphabet])
    yield 1, words, arr
    for _ in range(2, max_len + 1):
        nxt_words = []
        parents = []
        letters = []
        for i, w in enumerate(words):
            for x in alphabet:
                if w[-1] == -x:
                    continue
                nxt_words.append(w + (x,))
                parents.append(i)
                letters.append(x)
        if not nxt_words:
            return
        letter_arr = np.stack([mats[x] for x in letters])
        arr = arr[parents] @ letter_arr
        words = nxt_words
        yield len(words[0]), words, arr


# ----------------------------------------------------------------------
# normal forms


def coset_representatives(gens, sub, max_len, side="left"):
    """Minimal-length, lexicographically-first representatives of nontrivial
    cosets (left: wH, right: Hw) among words of length <= max_len."""
    reps = []
    for w in enumerate_reduced(gens, max_len):
        if not w:
            continue
        probe = w if side == "left" else inverse(w)
        if coset_norm(probe, sub) != len(w):
            continue
        dup = False
        for r in reps:
            if len(r) > len(w):
                continue
            diff = concat(inverse(r), w) if side == "left" else concat(w, inverse(r))
            if sub.contains(diff):
                dup = True
                break
        if not dup:
            reps.append(w)
    return reps


def amalgam_normal_forms(gens1, gens2, sub, max_syllables, rep_len=1):
    """Alternating normal forms of the amalgam of two copies along a subgroup.

    Yields tuples of (factor, word) syllables; syllables are coset
    representatives (length <= rep_len) outside the subgroup, consecutive
    syllables alternate factors.  Distinct outputs are distinct elements
    of the abstract amalgam.
    """
    reps = {1: coset_representatives(gens1, sub, rep_len),
            2: coset_representatives(gens2, sub, rep_len)}

    def extend(seq, remaining):
        yield seq
        if remaining == 0:
            return
        last = seq[-1][0] if seq else None
        for factor in (1, 2):
            if factor == last:
                continue
            for r in reps[factor]:
                yield from extend(seq + ((factor, r),), remaining - 1)

    for seq in extend((), max_syllables):
        if seq:
            yield seq


def hnn_normal_forms(gens, sub_minus, sub_plus, phi, max_len, gamma_len=None):
    """Britton normal forms g0 t^{e1} g1 ... t^{en} gn of total length <= max_len.

    phi maps each generator word of sub_minus to the corresponding word of
    sub_plus (the relation is t h- t^{-1} = phi(h-)).  After each t the
    next factor is a minimal representative of a right coset of sub_minus;
    after each t^{-1}, of sub_plus; pinches t 1 t^{-1} / t^{-1} 1 t and
    their H-conjugate forms are excluded, so distinct outputs are distinct
    elements of the HNN extension.
    """
    minus_gens = [reduce_word(w) for w in sub_minus.generators]
    plus_targets = []
    for w in minus_gens:
        img = phi[word_str(gens, w)]
        plus_targets.append(reduce_word(img) if isinstance(img, tuple)
                            else parse_word(gens, img))
    if len(set(plus_targets)) != len(plus_targets):
        raise ConfigError("phi must be injective on the generators of H-")
    for tgt in plus_targets:
        if not sub_plus.contains(tgt):
            raise ConfigError("phi image is not in H+")
    if gamma_len is None:
        gamma_len = max_len

    def right_reps(sub, budget):
        out = [()]
        for w in enumerate_reduced(gens, budget):
            if w and coset_norm(inverse(w), sub) == len(w):
                dup = any(len(r) <= len(w) and sub.contains(concat(w, inverse(r)))
                          for r in out if r)
                if not dup:
                    out.append(w)
        return out

    reps_after_t = right_reps(sub_minus, max_len)      # g with no H- left-prefix
    reps_after_tinv = right_reps(sub_plus, max_len)

    def extend(prefix_len, seq, last_sign):
        yield seq
        budget = max_len - prefix_len
        if budget <= 0:
            return
        for sign in (1, -1):
            # pinch: t g t^{-1} with g in H- (rep ()) or t^{-1} g t with g in H+
            if seq and seq[-1] == ("g", ()) and len(seq) >= 2 and seq[-2][0] == "t" \
                    and seq[-2][1] == -sign:
                continue
            if budget < 1:
                continue
            reps = reps_after_t if sign == 1 else reps_after_tinv
            for r in reps:
                if len(r) + 1 > budget:
                    continue
                yield from extend(prefix_len + 1 + len(r),
                                  seq + (("t", sign), ("g", r)), sign)

    for g0 in enumerate_reduced(gens, gamma_len):
        yield from extend(len(g0), (("g", g0),), 0)


def evaluate_hnn_form(rep, t_matrix, form):
    """Matrix of a Britton form under rho extended by the stable letter."""
    t_inv = t_matrix.inv()
    out = Matrix.identity(t_matrix.field, t_matrix.rows)
    for kind, val in form:
        if kind == "g":
            m = rep.evaluate(val)
            if m.field == "R" and t_matrix.field == "C":
                m = Matrix("C", m.array.astype(complex))
            out = out @ m
        else:
            out = out @ (t_matrix if val == 1 else t_inv)
    return out
