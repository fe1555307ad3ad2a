"""Floating-point adder netlist (positive normalized operands, round to
nearest ties to even) and the commutativity miter add(a,b) vs add(b,a).

Numbers are (E, M) with an m-bit exponent and an n-bit significand.  The
operand with the larger key (E, M), compared lexicographically, is the large
operand; on a full tie the second operand is taken as large, which is the same
value either way.

The circuit is built chunk by chunk.  Every arithmetic stage is cut into
bit-slices, each shifter stage into link chunks (relays and sticky chain for
the bits it may shift out) and one core chunk of multiplexers.
"""
from __future__ import annotations

from dataclasses import dataclass

from ..cnf import Clause, CnfFormula
from ..proofdoor import ProofdoorDescriptor
from .netlist import Encoding, Netlist, encode_circuit
from .staging import staged_descriptor


def fp_add_reference(ea: int, ma: int, eb: int, mb: int, n: int, m: int) -> tuple[int, int]:
    """Integer model of the adder pipeline.  Returns (E_final, Sigma_final)."""
    mask_n, mask_m = (1 << n) - 1, (1 << m) - 1
    if (ea, ma) > (eb, mb):
        el, ml, es, ms = ea, ma, eb, mb
    else:
        el, ml, es, ms = eb, mb, ea, ma
    diff = (el - es) & mask_m
    word, sticky = ms << 2, 0
    for j in range(m):
        if diff >> j & 1:
            k = 1 << j
            sticky |= int(word & ((1 << k) - 1) != 0)
            word >>= k
    mp, g, r = word >> 2, word >> 1 & 1, word & 1
    total = ml + mp
    c, sig = total >> n, total & mask_n
    # the normalised guard bit is not used by round-to-nearest-even
    if c:
        sn, rn, stn = (sig >> 1) | (1 << (n - 1)), g, r | sticky
    else:
        sn, rn, stn = sig, r, sticky
    e_out = (el + c) & mask_m
    inc = rn & ((sn & 1) | stn)
    rnd = sn + inc
    kappa, rnd = rnd >> n, rnd & mask_n
    final = (rnd >> 1) | (1 << (n - 1)) if kappa else rnd
    return (e_out + kappa) & mask_m, final


class _Builder:
    def __init__(self, n: int, m: int, sides):
        if n < 1 or m < 1:
            raise ValueError("need n >= 1 and m >= 1")
        self.n, self.m = n, m
        self.nl = Netlist()
        self.labels: list[str] = []
        self.sides = sides              # [(tag, x operand, y operand)]
        self.st = {tag: {} for tag, _, _ in sides}

    def chunk(self, label):
        self.labels.append(label)
        self.nl.chunk = label

    def each(self, fn):
        for tag, x, y in self.sides:
            self.nl.side = tag
            fn(self.st[tag], x, y, tag)
        self.nl.side = None

    def at(self, stage, pos=0):
        self.nl.stage, self.nl.pos = stage, pos

    def build(self):
        n, m, nl = self.n, self.m, self.nl
        nl.chunk = "cmp"
        ops = {"a": (nl.input_vector("E_a", m), nl.input_vector("M_a", n)),
               "b": (nl.input_vector("E_b", m), nl.input_vector("M_b", n))}
        self.chunk("cmp")
        relay = {}
        for name, (e, mm) in ops.items():
            self.at("relay")
            relay[name] = ([self._buf(w, self._cpos(i, 4)) for i, w in enumerate(e)],
                           [self._buf(w, self._cpos(i, 4)) for i, w in enumerate(mm)])
        self.relay = relay
        self.each(lambda s, x, y, t: self._compare(s, ops[x], ops[y], t))
        self.chunk("sel")
        self.each(lambda s, x, y, t: self._select(s, relay[x], relay[y], t))
        for i in range(m):
            self.chunk(f"sub.{i}")
            self.each(lambda s, x, y, t: self._sub_slice(s, i, t))
        for j in range(m):
            self._shift_stage(j)
        for i in range(n):
            self.chunk(f"add.{i}")
            self.each(lambda s, x, y, t: self._add_slice(s, i, t))
        self.chunk("norm")
        self.each(lambda s, x, y, t: self._normalize(s, t))
        for i in range(m):
            self.chunk(f"eout.{i}")
            self.each(lambda s, x, y, t: self._eout_slice(s, i, t))
        for i in range(n):
            self.chunk(f"rnd.{i}")
            self.each(lambda s, x, y, t: self._round_slice(s, i, t))
        self.chunk("final")
        self.each(lambda s, x, y, t: self._final_shift(s, t))
        for i in range(m):
            self.chunk(f"efin.{i}")
            self.each(lambda s, x, y, t: self._efin_slice(s, i, t))
        return self

    def _cpos(self, i, sub):
        # comparator layout key: bit i from the MSB down, then gate kind
        return (max(self.n, self.m) - i) * 10 + sub

    def _buf(self, w, pos):
        self.nl.pos = pos
        return self.nl.BUF(w)

    # stage 1: key comparison ------------------------------------------------------
    def _comparator(self, xs, ys, prefix, tag, want_lt=True):
        nl = self.nl
        width = len(xs)
        eq = []
        for i in range(width):
            self.at(f"{prefix}.eq", self._cpos(i, 2))
            eq.append(nl.EQ(xs[i], ys[i]))
        self.at(f"{prefix}.chain", self._cpos(width - 1, 1))
        p = [None] * width
        p[width - 1] = nl.CONST(1)
        for i in range(width - 2, -1, -1):
            self.at(f"{prefix}.chain", self._cpos(i, 1))
            p[i] = nl.AND(p[i + 1], eq[i + 1])
        gt, lt = [], []
        for i in range(width):
            self.at(f"{prefix}.gtlt", self._cpos(i, 3))
            gt.append(nl.AND(p[i], xs[i], -ys[i]))
            if want_lt:
                lt.append(nl.AND(p[i], -xs[i], ys[i]))
        self.at(f"{prefix}.agg", self._cpos(-1, 0))
        out = {"GT": nl.OR(*gt), "EQ": nl.AND(*eq)}
        if want_lt:
            out["LT"] = nl.OR(*lt)
        nl.name(f"{tag}.{prefix}.eq", eq)
        nl.name(f"{tag}.{prefix}.GT", out["GT"])
        return out

    def _compare(self, s, x, y, tag):
        nl = self.nl
        ce = self._comparator(x[0], y[0], "cmp", tag)
        cm = self._comparator(x[1], y[1], "key", tag, want_lt=False)
        self.at("key.sel", self._cpos(-1, 1))
        s["sel"] = nl.OR(ce["GT"], nl.AND(ce["EQ"], cm["GT"]))
        s["cmp"] = ce
        nl.name(f"{tag}.sel", s["sel"])

    # stage 2: selection -------------------------------------------------------------
    def _select(self, s, x, y, tag):
        nl, sel = self.nl, s["sel"]
        el, es, ml, ms = [], [], [], []
        for i in range(self.m):
            self.at("sel.exp", i)
            el.append(nl.MUX(sel, x[0][i], y[0][i]))
            es.append(nl.MUX(sel, y[0][i], x[0][i]))
        for i in range(self.n):
            self.at("sel.man", i)
            ml.append(nl.MUX(sel, x[1][i], y[1][i]))
            ms.append(nl.MUX(sel, y[1][i], x[1][i]))
        s.update(El=el, Es=es, Ml=ml, Ms=ms)
        for k in ("El", "Es", "Ml", "Ms"):
            nl.name(f"{tag}.{k}", s[k])

    # stage 3: exponent difference, bit-sliced ------------------------------------
    def _sub_slice(self, s, i, tag):
        nl = self.nl
        self.at("sub", i)
        if i == 0:
            s["bin"] = nl.CONST(1)
            s["Diff"], s["El2"] = [], []
        d, s["bin"] = nl.FA(s["El"][i], -s["Es"][i], s["bin"])
        s["Diff"].append(d)
        self.at("relay", i)
        s["El2"].append(nl.BUF(s["El"][i]))
        nl.name(f"{tag}.Diff", d)

    # stage 4: barrel shifter with guard/round/sticky ------------------------------
    def _shift_stage(self, j):
        n = self.n
        width = n + 2
        k = 1 << j
        kk = min(k, width)
        if j == 0:
            for tag, _, _ in self.sides:
                st = self.st[tag]
                st["W"] = [None, None] + list(st["Ms"])
                st["S"] = None
        for p in range(kk):
            self.chunk(f"shift.{j}.link.{p}")
            self.each(lambda s, x, y, t: self._link(s, p))
        self.chunk(f"shift.{j}.core")
        self.each(lambda s, x, y, t: self._core(s, j, k, kk, t))

    def _link(self, s, p):
        nl = self.nl
        self.at("shift.link", p)
        w = s["W"][p]
        if w is None:
            self.at("shift.const", p)
            w = nl.CONST(0)
            self.at("shift.link", p)
        if p == 0:
            s["r"] = []
        s["r"].append(nl.BUF(w))
        self.at("shift.sticky", p)
        s["o"] = nl.BUF(w) if p == 0 else nl.OR(s["o"], w)

    def _core(self, s, j, k, kk, tag):
        nl, n = self.nl, self.n
        width = n + 2
        d = s["Diff"][j]
        W = s["W"]
        zero = None
        new = []
        for p in range(width):
            key = (p % k) * width + p
            src = W[p + k] if p + k < width else None
            hold = s["r"][p] if p < kk else W[p]
            if src is None or hold is None:
                if zero is None:
                    self.at("shift.const", key)
                    zero = nl.CONST(0)
                src = zero if src is None else src
                hold = zero if hold is None else hold
            self.at("shift.core" if p >= 2 else "shift.grs", key)
            new.append(nl.MUX(d, src, hold))
        self.at("shift.sticky", width * k)
        t = nl.AND(d, s["o"])
        s["S"] = t if s["S"] is None else nl.OR(s["S"], t)
        s["W"] = new
        if j == self.m - 1:
            s["Mp"], s["G"], s["R"] = new[2:], new[1], new[0]
            nl.name(f"{tag}.Mp", s["Mp"])
            nl.name(f"{tag}.GRS", [s["G"], s["R"], s["S"]])

    # stage 5: significand addition, bit-sliced --------------------------------------
    def _add_slice(self, s, i, tag):
        nl = self.nl
        self.at("add", i)
        if i == 0:
            s["Sig"] = []
            sig, s["c"] = nl.HA(s["Ml"][0], s["Mp"][0])
        else:
            sig, s["c"] = nl.FA(s["Ml"][i], s["Mp"][i], s["c"])
        s["Sig"].append(sig)
        nl.name(f"{tag}.Sigma", sig)

    # stage 6: normalization ----------------------------------------------------------
    def _normalize(self, s, tag):
        nl, n = self.nl, self.n
        c, sig = s["c"], s["Sig"]
        self.at("norm.const", n)
        one = nl.CONST(1)
        out = [None] * n
        for i in range(n - 1, -1, -1):
            self.at("norm.mux", i)
            out[i] = nl.MUX(c, one if i == n - 1 else sig[i + 1], sig[i])
        self.at("norm.grs", 0)
        s["Gn"] = nl.MUX(c, sig[0], s["G"])
        s["Rn"] = nl.MUX(c, s["G"], s["R"])
        s["Sn"] = nl.MUX(c, nl.OR(s["R"], s["S"]), s["S"])
        self.at("relay", 0)
        s["c2"] = nl.BUF(c)
        s["Sn_"] = out
        nl.name(f"{tag}.Sigma_norm", out)

    def _eout_slice(self, s, i, tag):
        nl = self.nl
        self.at("eout", i)
        if i == 0:
            s["Eout"] = []
            s["ec"] = s["c2"]
        e, s["ec"] = nl.HA(s["El2"][i], s["ec"])
        s["Eout"].append(e)
        nl.name(f"{tag}.E_out", e)

    # stage 7: rounding ---------------------------------------------------------------
    def _round_slice(self, s, i, tag):
        nl = self.nl
        sn = s["Sn_"]
        if i == 0:
            self.at("rnd.inc", 0)
            u = nl.OR(sn[0], s["Sn"])
            s["k"] = nl.AND(s["Rn"], u)
            s["Rnd"] = []
        self.at("rnd", i)
        r, s["k"] = nl.HA(sn[i], s["k"])
        s["Rnd"].append(r)
        nl.name(f"{tag}.Sigma_rnd", r)

    def _final_shift(self, s, tag):
        nl, n = self.nl, self.n
        kappa, rnd = s["k"], s["Rnd"]
        self.at("final.const", n)
        one = nl.CONST(1)
        out = [None] * n
        for i in range(n - 1, -1, -1):
            self.at("final.mux", i)
            out[i] = nl.MUX(kappa, one if i == n - 1 else rnd[i + 1], rnd[i])
        self.at("relay", 0)
        s["k2"] = nl.BUF(kappa)
        s["Sfinal"] = out
        nl.name(f"{tag}.Sigma_final", out)

    def _efin_slice(self, s, i, tag):
        nl = self.nl
        self.at("efin", i)
        if i == 0:
            s["Efinal"] = []
            s["fc"] = s["k2"]
        e, s["fc"] = nl.HA(s["Eout"][i], s["fc"])
        s["Efinal"].append(e)
        nl.name(f"{tag}.E_final", e)


def encode_fp_adder(n: int, m: int, side: str = "L") -> Netlist:
    """Single adder add(a, b) over inputs E_a, M_a, E_b, M_b.  Output groups
    are ``<side>.Sigma_final`` and ``<side>.E_final``."""
    return _Builder(n, m, [(side, "a", "b")]).build().nl


@dataclass
class FpMiter:
    formula: CnfFormula
    descriptor: ProofdoorDescriptor
    netlist: Netlist
    encoding: Encoding
    labels: list


def build_fp_comm_miter(n: int, m: int) -> FpMiter:
    b = _Builder(n, m, [("L", "a", "b"), ("R", "b", "a")]).build()
    nl = b.nl
    extra: dict = {}
    # after the comparators: the two keys are antisymmetric and a double
    # "not larger" only happens on identical operands
    sel_l, sel_r = b.st["L"]["sel"], b.st["R"]["sel"]
    facts = [(Clause((-sel_l, -sel_r)), None)]
    for (ea, ma), (eb, mb) in [(b.relay["a"], b.relay["b"])]:
        for u, v in list(zip(ea, eb)) + list(zip(ma, mb)):
            facts.append((Clause((sel_l, sel_r, -u, v)), None))
            facts.append((Clause((sel_l, sel_r, u, -v)), None))
    extra["cmp"] = facts
    # output disagreement, shortened one error bit per chunk
    outs = [(b.st["L"]["Sfinal"][i], b.st["R"]["Sfinal"][i], "M", i) for i in range(n - 1, -1, -1)]
    outs += [(b.st["L"]["Efinal"][i], b.st["R"]["Efinal"][i], "E", i) for i in range(m)]
    errs = []
    for t, (lw, rw, kind, i) in enumerate(outs):
        b.chunk(f"err.{t}")
        b.at("miter.err", t)
        e = nl.XOR(lw, rw)
        nl.name(f"e{kind}", e)
        errs.append(e)
    nl.chunk = "err.0"
    b.at("miter.disagree", 0)
    nl.assert_clause(errs)
    for t in range(len(outs) - 1):
        rest = errs[t + 1:]
        extra[f"err.{t}"] = [(Clause(rest), set(errs[t:]) | {outs[t][0], outs[t][1]})]
    enc = encode_circuit(nl)
    d = staged_descriptor(nl, enc, b.labels, extra, unpaired={sel_l, sel_r})
    return FpMiter(enc.formula, d, nl, enc, b.labels)
