"""MatrixMarket reader/writer for dense real work.

Supports the ``coordinate`` and ``array`` formats with ``real`` or
``integer`` fields and ``general`` or ``symmetric`` symmetry; symmetric
storage (lower triangle) is mirrored to a full dense matrix on read.
Complex, pattern and skew inputs are rejected.  Parse failures raise
:class:`~prootkit.errors.MMParseError` carrying the 1-based line number.

Written files always parse back bit-identically (values use repr-exact
``%.17g`` formatting).
"""

import numpy as np

from .errors import MMParseError

_BANNER = "%%MatrixMarket"


def _parse_float(token, line_no):
    try:
        return float(token)
    except ValueError:
        raise MMParseError("bad numeric value %r" % token, line_no) from None


def _parse_int(token, line_no):
    try:
        return int(token)
    except ValueError:
        raise MMParseError("bad integer %r" % token, line_no) from None


def read_matrix_market(path):
    """Read a MatrixMarket file into a dense float64 array."""
    with open(path) as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise MMParseError("empty file", 1)

    header = lines[0].split()
    if not lines[0].startswith(_BANNER) or len(header) != 5:
        raise MMParseError(
            "header must be '%s matrix <format> <field> <symmetry>'"
            % _BANNER,
            1,
        )
    _, obj, fmt, field, symmetry = (t.lower() for t in header)
    if obj != "matrix":
        raise MMParseError("unsupported object %r" % obj, 1)
    if fmt not in ("coordinate", "array"):
        raise MMParseError("unsupported format %r" % fmt, 1)
    if field in ("complex", "pattern"):
        raise MMParseError("unsupported field %r (real data only)" % field, 1)
    if field not in ("real", "integer"):
        raise MMParseError("unknown field %r" % field, 1)
    if symmetry not in ("general", "symmetric"):
        raise MMParseError(
            "unsupported symmetry %r (general or symmetric)" % symmetry, 1
        )

    # body = (line_no, tokens) with comments and blanks skipped
    body = [
        (i + 1, line.split())
        for i, line in enumerate(lines)
        if i > 0 and line.strip() and not line.lstrip().startswith("%")
    ]
    if not body:
        raise MMParseError("missing size line", len(lines) + 1)
    size_no, size_tok = body[0]
    entries = body[1:]

    if fmt == "coordinate":
        if len(size_tok) != 3:
            raise MMParseError(
                "coordinate size line needs 'rows cols nnz'", size_no
            )
        rows, cols, nnz = (_parse_int(t, size_no) for t in size_tok)
        if rows <= 0 or cols <= 0 or nnz < 0:
            raise MMParseError("invalid dimensions", size_no)
        if symmetry == "symmetric" and rows != cols:
            raise MMParseError("symmetric matrix must be square", size_no)
        if len(entries) != nnz:
            raise MMParseError(
                "expected %d entries, found %d" % (nnz, len(entries)),
                entries[-1][0] if entries else size_no,
            )
        a = np.zeros((rows, cols))
        seen = set()
        for line_no, tok in entries:
            if len(tok) != 3:
                raise MMParseError("entry needs 'i j value'", line_no)
            i = _parse_int(tok[0], line_no)
            j = _parse_int(tok[1], line_no)
            v = _parse_float(tok[2], line_no)
            if not (1 <= i <= rows and 1 <= j <= cols):
                raise MMParseError(
                    "index (%d, %d) outside %dx%d" % (i, j, rows, cols),
                    line_no,
                )
            if symmetry == "symmetric" and i < j:
                raise MMParseError(
                    "symmetric files store the lower triangle; "
                    "got (%d, %d)" % (i, j),
                    line_no,
                )
            if (i, j) in seen:
                raise MMParseError("duplicate entry (%d, %d)" % (i, j), line_no)
            seen.add((i, j))
            a[i - 1, j - 1] = v
            if symmetry == "symmetric" and i != j:
                a[j - 1, i - 1] = v
        return a

    # array format: dense values in column-major order
    if len(size_tok) != 2:
        raise MMParseError("array size line needs 'rows cols'", size_no)
    rows, cols = (_parse_int(t, size_no) for t in size_tok)
    if rows <= 0 or cols <= 0:
        raise MMParseError("invalid dimensions", size_no)
    if symmetry == "symmetric" and rows != cols:
        raise MMParseError("symmetric matrix must be square", size_no)
    if symmetry == "symmetric":
        expected = rows * (rows + 1) // 2
    else:
        expected = rows * cols
    if len(entries) != expected:
        raise MMParseError(
            "expected %d values, found %d" % (expected, len(entries)),
            entries[-1][0] if entries else size_no,
        )
    a = np.zeros((rows, cols))
    it = iter(entries)
    if symmetry == "symmetric":
        for j in range(cols):
            for i in range(j, rows):
                line_no, tok = next(it)
                if len(tok) != 1:
                    raise MMParseError("expected one value per line", line_no)
                v = _parse_float(tok[0], line_no)
                a[i, j] = v
                a[j, i] = v
    else:
        for j in range(cols):
            for i in range(rows):
                line_no, tok = next(it)
                if len(tok) != 1:
                    raise MMParseError("expected one value per line", line_no)
                a[i, j] = _parse_float(tok[0], line_no)
    return a


def write_matrix_market(path, a, fmt="array", symmetry="general"):
    """Write a dense array; symmetric output stores the lower triangle."""
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 2:
        raise ValueError("expected a 2-D array")
    rows, cols = a.shape
    if symmetry not in ("general", "symmetric"):
        raise ValueError("symmetry must be 'general' or 'symmetric'")
    if fmt not in ("array", "coordinate"):
        raise ValueError("fmt must be 'array' or 'coordinate'")
    if symmetry == "symmetric" and rows != cols:
        raise ValueError("symmetric output requires a square matrix")

    with open(path, "w") as fh:
        fh.write("%s matrix %s real %s\n" % (_BANNER, fmt, symmetry))
        if fmt == "array":
            fh.write("%d %d\n" % (rows, cols))
            if symmetry == "symmetric":
                for j in range(cols):
                    for i in range(j, rows):
                        fh.write("%.17g\n" % a[i, j])
            else:
                for j in range(cols):
                    for i in range(rows):
                        fh.write("%.17g\n" % a[i, j])
        else:
            if symmetry == "symmetric":
                coords = [
                    (i, j) for j in range(cols) for i in range(j, rows)
                    if a[i, j] != 0.0
                ]
            else:
                coords = [
                    (i, j) for j in range(cols) for i in range(rows)
                    if a[i, j] != 0.0
                ]
            fh.write("%d %d %d\n" % (rows, cols, len(coords)))
            for i, j in coords:
                fh.write("%d %d %.17g\n" % (i + 1, j + 1, a[i, j]))
