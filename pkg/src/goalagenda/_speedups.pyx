# cython: boundscheck=False, wraparound=False, nonecheck=False, cdivision=True
"""Compiled planning-graph layer kernel (bitset twin of _kernel_py).

Same step contract as the pure backend: masks cross the boundary as Python
ints, words are little-endian uint64. Unlike the pure backend this one
re-evaluates every fact pair each layer; the pure twin's incremental rule is
validated against this full computation by the parity tests.
"""

from cpython.bytes cimport PyBytes_AS_STRING, PyBytes_FromStringAndSize
from libc.stdlib cimport calloc, free, malloc
from libc.string cimport memcpy, memset

ctypedef unsigned long long u64

cdef extern from *:
    int __builtin_ctzll(unsigned long long)

BACKEND = "c"


cdef void _int_to_words(object value, u64 *dest, Py_ssize_t nwords):
    cdef bytes raw = value.to_bytes(nwords * 8, "little")
    memcpy(dest, PyBytes_AS_STRING(raw), nwords * 8)


cdef object _words_to_int(u64 *src, Py_ssize_t nwords):
    cdef bytes raw = PyBytes_FromStringAndSize(<char *> src, nwords * 8)
    return int.from_bytes(raw, "little")


cdef inline bint _subset(u64 *small, u64 *big, Py_ssize_t n):
    cdef Py_ssize_t w
    for w in range(n):
        if small[w] & ~big[w]:
            return False
    return True


cdef inline bint _intersects(u64 *a, u64 *b, Py_ssize_t n):
    cdef Py_ssize_t w
    for w in range(n):
        if a[w] & b[w]:
            return True
    return False


cdef class GraphKernel:
    cdef int n_facts, n_actions, n_nodes
    cdef Py_ssize_t fw, nw
    cdef u64 *pre
    cdef u64 *add
    cdef u64 *dele
    cdef u64 *preadd
    cdef int *pre_items
    cdef int *pre_off
    cdef int *add_items
    cdef int *add_off
    # per-step scratch
    cdef u64 *fmask
    cdef u64 *mrows
    cdef u64 *urows
    cdef u64 *am
    cdef u64 *applmask
    cdef u64 *achv
    cdef u64 *nm
    cdef u64 *nextrows
    cdef u64 *nextmask
    cdef unsigned char *appl
    cdef int *appl_ids

    def __cinit__(self, int n_facts, nodes):
        cdef int a, f, idx
        cdef Py_ssize_t total_pre = 0, total_add = 0
        self.n_facts = n_facts
        self.n_actions = len(nodes)
        self.n_nodes = self.n_actions + n_facts
        self.fw = (n_facts + 63) >> 6 if n_facts else 1
        self.nw = (self.n_nodes + 63) >> 6 if self.n_nodes else 1

        self.pre = <u64 *> calloc(self.n_nodes * self.fw, 8)
        self.add = <u64 *> calloc(self.n_nodes * self.fw, 8)
        self.dele = <u64 *> calloc(self.n_nodes * self.fw, 8)
        self.preadd = <u64 *> calloc(self.n_nodes * self.fw, 8)

        for pre, add, delete in nodes:
            total_pre += len(pre)
            total_add += len(add)
        total_pre += n_facts  # no-op preconditions
        total_add += n_facts
        self.pre_items = <int *> malloc(total_pre * sizeof(int))
        self.add_items = <int *> malloc(total_add * sizeof(int))
        self.pre_off = <int *> malloc((self.n_nodes + 1) * sizeof(int))
        self.add_off = <int *> malloc((self.n_nodes + 1) * sizeof(int))

        cdef Py_ssize_t pi = 0, ai = 0
        a = 0
        for pre, add, delete in nodes:
            self.pre_off[a] = pi
            self.add_off[a] = ai
            for f in pre:
                self.pre_items[pi] = f
                pi += 1
                self.pre[a * self.fw + (f >> 6)] |= (<u64> 1) << (f & 63)
            for f in add:
                self.add_items[ai] = f
                ai += 1
                self.add[a * self.fw + (f >> 6)] |= (<u64> 1) << (f & 63)
            for f in delete:
                self.dele[a * self.fw + (f >> 6)] |= (<u64> 1) << (f & 63)
            a += 1
        for f in range(n_facts):
            idx = self.n_actions + f
            self.pre_off[idx] = pi
            self.add_off[idx] = ai
            self.pre_items[pi] = f
            pi += 1
            self.add_items[ai] = f
            ai += 1
            self.pre[idx * self.fw + (f >> 6)] |= (<u64> 1) << (f & 63)
            self.add[idx * self.fw + (f >> 6)] |= (<u64> 1) << (f & 63)
        self.pre_off[self.n_nodes] = pi
        self.add_off[self.n_nodes] = ai

        cdef Py_ssize_t w
        for a in range(self.n_nodes):
            for w in range(self.fw):
                self.preadd[a * self.fw + w] = (
                    self.pre[a * self.fw + w] | self.add[a * self.fw + w])

        self.fmask = <u64 *> calloc(self.fw, 8)
        self.nextmask = <u64 *> calloc(self.fw, 8)
        self.mrows = <u64 *> calloc(max(n_facts, 1) * self.fw, 8)
        self.urows = <u64 *> calloc(self.n_nodes * self.fw, 8)
        self.am = <u64 *> calloc(self.n_nodes * self.nw, 8)
        self.applmask = <u64 *> calloc(self.nw, 8)
        self.achv = <u64 *> calloc(max(n_facts, 1) * self.nw, 8)
        self.nm = <u64 *> calloc(self.nw, 8)
        self.nextrows = <u64 *> calloc(max(n_facts, 1) * self.fw, 8)
        self.appl = <unsigned char *> calloc(self.n_nodes, 1)
        self.appl_ids = <int *> malloc(self.n_nodes * sizeof(int))

    def __dealloc__(self):
        free(self.pre); free(self.add); free(self.dele); free(self.preadd)
        free(self.pre_items); free(self.pre_off)
        free(self.add_items); free(self.add_off)
        free(self.fmask); free(self.nextmask); free(self.mrows)
        free(self.urows); free(self.am); free(self.applmask)
        free(self.achv); free(self.nm); free(self.nextrows)
        free(self.appl); free(self.appl_ids)

    cdef inline bint _interferes(self, int a, int b):
        if _intersects(self.dele + a * self.fw, self.preadd + b * self.fw, self.fw):
            return True
        return _intersects(self.dele + b * self.fw, self.preadd + a * self.fw, self.fw)

    def step(self, object fact_mask, mutex_rows, bint want_actions=False):
        cdef int P = self.n_facts, N = self.n_nodes
        cdef Py_ssize_t fw = self.fw, nw = self.nw
        cdef int a, b, f, p, q, i, j, n_appl = 0
        cdef Py_ssize_t w, k
        cdef bint mx

        _int_to_words(fact_mask, self.fmask, fw)
        for p in range(P):
            _int_to_words(mutex_rows[p], self.mrows + p * fw, fw)

        # applicable nodes + per-node union of precondition mutex rows
        memset(self.applmask, 0, nw * 8)
        memset(self.appl, 0, N)
        for a in range(N):
            if not _subset(self.pre + a * fw, self.fmask, fw):
                continue
            memset(self.urows + a * fw, 0, fw * 8)
            for k in range(self.pre_off[a], self.pre_off[a + 1]):
                p = self.pre_items[k]
                for w in range(fw):
                    self.urows[a * fw + w] |= self.mrows[p * fw + w]
            if _intersects(self.urows + a * fw, self.pre + a * fw, fw):
                continue
            self.appl[a] = 1
            self.appl_ids[n_appl] = a
            n_appl += 1
            self.applmask[a >> 6] |= (<u64> 1) << (a & 63)

        # action mutex over applicable pairs
        memset(self.am, 0, <size_t> N * nw * 8)
        for i in range(n_appl):
            a = self.appl_ids[i]
            for j in range(i + 1, n_appl):
                b = self.appl_ids[j]
                mx = self._interferes(a, b)
                if not mx:
                    mx = _intersects(self.urows + a * fw, self.pre + b * fw, fw)
                if mx:
                    self.am[a * nw + (b >> 6)] |= (<u64> 1) << (b & 63)
                    self.am[b * nw + (a >> 6)] |= (<u64> 1) << (a & 63)

        # next layer facts and achiever sets
        memcpy(self.nextmask, self.fmask, fw * 8)
        memset(self.achv, 0, <size_t> max(P, 1) * nw * 8)
        for i in range(n_appl):
            a = self.appl_ids[i]
            for w in range(fw):
                self.nextmask[w] |= self.add[a * fw + w]
            for k in range(self.add_off[a], self.add_off[a + 1]):
                f = self.add_items[k]
                self.achv[f * nw + (a >> 6)] |= (<u64> 1) << (a & 63)

        # fact mutex: p,q mutex iff every applicable achiever pair is mutex
        memset(self.nextrows, 0, <size_t> max(P, 1) * fw * 8)
        cdef u64 word
        for p in range(P):
            if not (self.nextmask[p >> 6] >> (p & 63)) & 1:
                continue
            # nm := union over achievers a of (applicable and not mutex with a)
            memset(self.nm, 0, nw * 8)
            for w in range(nw):
                word = self.achv[p * nw + w]
                while word:
                    a = (w << 6) + __builtin_ctzll(word)
                    word &= word - 1
                    for k in range(nw):
                        self.nm[k] |= self.applmask[k] & ~self.am[a * nw + k]
            for q in range(p + 1, P):
                if not (self.nextmask[q >> 6] >> (q & 63)) & 1:
                    continue
                if not _intersects(self.achv + q * nw, self.nm, nw):
                    self.nextrows[p * fw + (q >> 6)] |= (<u64> 1) << (q & 63)
                    self.nextrows[q * fw + (p >> 6)] |= (<u64> 1) << (p & 63)

        applicable = [self.appl_ids[i] for i in range(n_appl)]
        next_fact_mask = _words_to_int(self.nextmask, fw)
        next_rows = [_words_to_int(self.nextrows + p * fw, fw) for p in range(P)]
        action_rows = None
        if want_actions:
            action_rows = [0] * N
            for i in range(n_appl):
                a = self.appl_ids[i]
                action_rows[a] = _words_to_int(self.am + a * nw, nw)
        return applicable, next_fact_mask, next_rows, action_rows
