"""Finite meet-semilattices as validated meet tables.

Elements are dense indices 0..n-1 with optional display names. The n x n meet
table is the single source of truth; the partial order is derived from it
(i <= j iff meet[i][j] == i) and never stored separately.
"""

from .errors import InputError, ValidationFailure

# Subset enumerations are 2^n; anything past this bound must fail loudly.
ENUMERATION_BOUND = 20


class IdempotencyViolation(ValidationFailure):
    def __init__(self, i, got):
        self.i, self.got = i, got
        super().__init__(f"meet[{i}][{i}] = {got}, expected {i}")


class CommutativityViolation(ValidationFailure):
    def __init__(self, i, j, ij, ji):
        self.pair = (i, j)
        super().__init__(f"meet[{i}][{j}] = {ij} but meet[{j}][{i}] = {ji}")


class AssociativityViolation(ValidationFailure):
    def __init__(self, i, j, k, left, right):
        self.triple = (i, j, k)
        super().__init__(
            f"(({i} ^ {j}) ^ {k}) = {left} but ({i} ^ ({j} ^ {k})) = {right}"
        )


class EmptySet(InputError):
    pass


class BoundExceeded(InputError):
    pass


class NoBottom(InputError):
    pass


class Semilattice:
    """A validated finite meet-semilattice.

    Construction runs the full exhaustive check (idempotency, commutativity,
    associativity, and the greatest-lower-bound property of the derived
    order), so an instance in hand is always valid. Immutable by convention.
    """

    def __init__(self, meet, names=None):
        table = tuple(tuple(int(x) for x in row) for row in meet)
        n = len(table)
        for row in table:
            if len(row) != n:
                raise InputError("meet table is not square")
            for x in row:
                if not 0 <= x < n:
                    raise InputError(f"meet table entry {x} out of range 0..{n - 1}")
        self.meet = table
        self.n = n
        if names is None:
            names = tuple(str(i) for i in range(n))
        else:
            names = tuple(str(s) for s in names)
            if len(names) != n:
                raise InputError("names length does not match table size")
            if len(set(names)) != n:
                raise InputError("element names are not distinct")
        self.names = names
        self._check()

    def _check(self):
        meet, n = self.meet, self.n
        for i in range(n):
            if meet[i][i] != i:
                raise IdempotencyViolation(i, meet[i][i])
        for i in range(n):
            for j in range(i + 1, n):
                if meet[i][j] != meet[j][i]:
                    raise CommutativityViolation(i, j, meet[i][j], meet[j][i])
        for i in range(n):
            for j in range(n):
                for k in range(n):
                    left = meet[meet[i][j]][k]
                    right = meet[i][meet[j][k]]
                    if left != right:
                        raise AssociativityViolation(i, j, k, left, right)
        # glb property of the derived order. A consequence of the three table
        # axioms, so failures are unreachable; kept as an internal assertion.
        for i in range(n):
            for j in range(n):
                m = meet[i][j]
                assert self.leq(m, i) and self.leq(m, j)
                for c in range(n):
                    if self.leq(c, i) and self.leq(c, j):
                        assert self.leq(c, m), (c, i, j, m)

    def __repr__(self):
        return f"Semilattice({self.n} elements: {', '.join(self.names)})"

    def name_of(self, i):
        return self.names[i]

    def index_of(self, name):
        try:
            return self.names.index(str(name))
        except ValueError:
            raise InputError(f"no element named {name!r}") from None

    def leq(self, i, j):
        """Derived order: i <= j iff i ^ j = i."""
        return self.meet[i][j] == i

    def meet_of(self, i, j):
        return self.meet[i][j]

    def meet_of_set(self, S):
        """Greatest lower bound of a nonempty index set; order-independent."""
        it = iter(sorted(S))
        try:
            acc = next(it)
        except StopIteration:
            raise EmptySet("meet of the empty set is undefined") from None
        for x in it:
            acc = self.meet[acc][x]
        return acc

    def bottom(self):
        """Index of the least element, or None."""
        for b in range(self.n):
            if all(self.leq(b, i) for i in range(self.n)):
                return b
        return None

    def top(self):
        for t in range(self.n):
            if all(self.leq(i, t) for i in range(self.n)):
                return t
        return None

    def comparable_pairs(self):
        """All (i, j) with i <= j, in lexicographic order. Includes i == j."""
        return [(i, j) for i in range(self.n) for j in range(self.n) if self.leq(i, j)]

    def finishing_set(self, k):
        """{j : k <= j}, the upward closure of k. Upward- and meet-closed."""
        return frozenset(j for j in range(self.n) if self.leq(k, j))

    def commencing_complement(self, S):
        """The complement of S; downward-closed when S is finishing."""
        return frozenset(range(self.n)) - frozenset(S)

    def is_subsemilattice(self, S):
        S = frozenset(S)
        return all(self.meet[i][j] in S for i in S for j in S)

    def is_finishing_subsemilattice(self, S):
        """Upward-closed and closed under meet. The empty set passes vacuously."""
        S = frozenset(S)
        for i in S:
            for j in range(self.n):
                if self.leq(i, j) and j not in S:
                    return False
        return self.is_subsemilattice(S)

    def generated_subsemilattice(self, M):
        """Smallest meet-closed superset of M (closure under pairwise meet)."""
        S = set(M)
        while True:
            new = {self.meet[i][j] for i in S for j in S} - S
            if not new:
                return frozenset(S)
            S |= new

    def enumerate_finishing_subsemilattices(self, bound=ENUMERATION_BOUND):
        """All nonempty finishing sub-semilattices, in sorted-bitset order."""
        if self.n > bound:
            raise BoundExceeded(f"n = {self.n} exceeds enumeration bound {bound}")
        out = []
        for mask in range(1, 1 << self.n):
            S = frozenset(i for i in range(self.n) if mask >> i & 1)
            if self.is_finishing_subsemilattice(S):
                out.append(S)
        return out

    def check_good(self, bound=ENUMERATION_BOUND):
        """Every nonempty finishing sub-semilattice has a least element.

        True for every finite semilattice; exposed so the property can be
        exercised rather than assumed.
        """
        for S in self.enumerate_finishing_subsemilattices(bound):
            if not any(all(self.leq(m, s) for s in S) for m in S):
                return False
        return True

    def atoms(self):
        """Minimal non-bottom elements. Requires a bottom."""
        b = self.bottom()
        if b is None:
            raise NoBottom("semilattice has no least element")
        out = []
        for i in range(self.n):
            if i == b:
                continue
            if all(j in (b, i) for j in range(self.n) if self.leq(j, i)):
                out.append(i)
        return frozenset(out)


def validate_semilattice(table, names=None):
    """Check all semilattice axioms exhaustively and wrap the table."""
    return Semilattice(table, names)


def product_semilattice(L1, L2):
    """Componentwise meet on L1 x L2, row-major: (i, j) -> i * L2.n + j."""
    n1, n2 = L1.n, L2.n
    meet = [[0] * (n1 * n2) for _ in range(n1 * n2)]
    for i1 in range(n1):
        for i2 in range(n2):
            for j1 in range(n1):
                for j2 in range(n2):
                    a = i1 * n2 + i2
                    b = j1 * n2 + j2
                    meet[a][b] = L1.meet[i1][j1] * n2 + L2.meet[i2][j2]
    names = [
        f"({L1.names[i1]},{L2.names[i2]})" for i1 in range(n1) for i2 in range(n2)
    ]
    return Semilattice(meet, names)


def product_index(L2, i1, i2):
    """Index of (i1, i2) in product_semilattice(L1, L2)."""
    return i1 * L2.n + i2


def chain(n, names=None):
    """The chain 0 < 1 < ... < n-1 with meet = min."""
    table = [[min(i, j) for j in range(n)] for i in range(n)]
    return Semilattice(table, names)


def diamond():
    """Four elements 0 < a, b < 1 with a ^ b = 0."""
    # order: 0, a, b, 1
    table = [
        [0, 0, 0, 0],
        [0, 1, 0, 1],
        [0, 0, 2, 2],
        [0, 1, 2, 3],
    ]
    return Semilattice(table, names=["0", "a", "b", "1"])


def antichain_with_bottom(k):
    """A bottom below k pairwise-incomparable elements."""
    n = k + 1
    table = [[0] * n for _ in range(n)]
    for i in range(1, n):
        table[i][i] = i
    return Semilattice(table)
