"""
Wire formats.

Ciphertext (binary): b"QCD1" | version u8 | n, m, s, k, tau, mu as u32 LE | delta f64 LE | values(m) | bases(m) |
c(n) | p(tau) | q(mu), each bitstring packed LSB-first into ceil(len / 8) bytes.
Certificate (binary): b"QCDY" | version u8 | m u32 LE | y(m).
Keys (JSON): {version, params, aux: {r}, dec: {theta, u, d, e, hpa_seed, hec_seed}} with hex bitstrings.
"""
import json
import struct

import numpy as np

from certified_deletion.bitvec import BitString
from certified_deletion.errors import CertifiedDeletionError, LengthMismatchError, SerializationError
from certified_deletion.hashcode import LinearCode, ToeplitzHash
from certified_deletion.qsim import QuantumRegister
from certified_deletion.scheme import AuxKey, Ciphertext, DecKey, DeletionCertificate, SchemeParams

FORMAT_VERSION = 1
CIPHERTEXT_MAGIC = b'QCD1'
CERTIFICATE_MAGIC = b'QCDY'

_CIPHERTEXT_HEADER = struct.Struct('<4sB6Id')
_CERTIFICATE_HEADER = struct.Struct('<4sBI')


def serialize_ciphertext(ct, params):
    values, bases = ct.quantum.describe()
    header = _CIPHERTEXT_HEADER.pack(CIPHERTEXT_MAGIC, FORMAT_VERSION, params.n, params.m, params.s, params.k,
                                     params.tau, params.mu, params.delta)
    return header + b''.join(part.to_bytes() for part in (values, bases, ct.c, ct.p, ct.q))


def deserialize_ciphertext(data, params=None):
    """Parses a ciphertext file into a fresh, unmeasured Ciphertext; header fields must match params if given."""
    if len(data) < _CIPHERTEXT_HEADER.size:
        raise SerializationError("ciphertext truncated: {} bytes is shorter than the header".format(len(data)))
    magic, version, n, m, s, k, tau, mu, delta = _CIPHERTEXT_HEADER.unpack_from(data)
    _check_magic_and_version(magic, version, CIPHERTEXT_MAGIC, "ciphertext")
    if params is not None:
        declared = {'n': n, 'm': m, 's': s, 'k': k, 'tau': tau, 'mu': mu, 'delta': delta}
        for name, value in declared.items():
            if getattr(params, name) != value:
                raise SerializationError(
                    "ciphertext header field {}={} does not match parameter {}".format(
                        name, value, getattr(params, name))
                )
    if m != s + k:
        raise SerializationError("ciphertext header is inconsistent: m={} but s+k={}".format(m, s + k))

    reader = _BitReader(data, _CIPHERTEXT_HEADER.size, "ciphertext")
    values = reader.read(m)
    bases = reader.read(m)
    c = reader.read(n)
    p = reader.read(tau)
    q = reader.read(mu)
    reader.finish()
    return Ciphertext(QuantumRegister(values.bits, bases.bits), c, p, q)


def serialize_certificate(cert):
    return _CERTIFICATE_HEADER.pack(CERTIFICATE_MAGIC, FORMAT_VERSION, len(cert.y)) + cert.y.to_bytes()


def deserialize_certificate(data, params=None):
    if len(data) < _CERTIFICATE_HEADER.size:
        raise SerializationError("certificate truncated: {} bytes is shorter than the header".format(len(data)))
    magic, version, m = _CERTIFICATE_HEADER.unpack_from(data)
    _check_magic_and_version(magic, version, CERTIFICATE_MAGIC, "certificate")
    if params is not None and m != params.m:
        raise SerializationError("certificate holds {} bits but the parameters need m={}".format(m, params.m))
    reader = _BitReader(data, _CERTIFICATE_HEADER.size, "certificate")
    y = reader.read(m)
    reader.finish()
    return DeletionCertificate(y)


def serialize_keys(params, aux, key):
    doc = {
        'version': FORMAT_VERSION,
        'params': {
            'n': params.n,
            'm': params.m,
            's': params.s,
            'k': params.k,
            'tau': params.tau,
            'mu': params.mu,
            'delta': params.delta,
            'code': {
                'name': params.code.name,
                'block_in': params.code.block_in,
                'block_syn': params.code.block_syn,
                'parity_check': BitString.from_bits(params.code.parity_check.reshape(-1)).to_hex(),
            },
        },
        'aux': {'r': aux.r.to_hex()},
        'dec': {
            'theta': key.theta.to_hex(),
            'u': key.u.to_hex(),
            'd': key.d.to_hex(),
            'e': key.e.to_hex(),
            'hpa_seed': key.h_pa.seed.to_hex(),
            'hec_seed': key.h_ec.seed.to_hex(),
        },
    }
    return json.dumps(doc, indent=2, sort_keys=True)


def deserialize_keys(text):
    """Returns (params, aux, key) from a key file's JSON text."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise SerializationError("key file is not valid JSON: {}".format(e))
    try:
        if doc['version'] != FORMAT_VERSION:
            raise SerializationError("unsupported key file version {}".format(doc['version']))
        p = doc['params']
        code_doc = p['code']
        block_in, block_syn = int(code_doc['block_in']), int(code_doc['block_syn'])
        matrix = BitString.from_hex(code_doc['parity_check'], block_in * block_syn).bits
        code = LinearCode.from_parity_check(np.array(matrix).reshape(block_syn, block_in), name=code_doc['name'])
        params = SchemeParams(n=int(p['n']), m=int(p['m']), s=int(p['s']), k=int(p['k']), tau=int(p['tau']),
                              mu=int(p['mu']), delta=float(p['delta']), code=code)

        aux = AuxKey(BitString.from_hex(doc['aux']['r'], params.m))
        dec = doc['dec']
        key = DecKey(
            theta=BitString.from_hex(dec['theta'], params.m),
            u=BitString.from_hex(dec['u'], params.n),
            d=BitString.from_hex(dec['d'], params.tau),
            e=BitString.from_hex(dec['e'], params.mu),
            h_pa=ToeplitzHash(params.s, params.n, BitString.from_hex(dec['hpa_seed'], params.s + params.n - 1)),
            h_ec=ToeplitzHash(params.s, params.tau, BitString.from_hex(dec['hec_seed'], params.s + params.tau - 1)),
        )
    except SerializationError:
        raise
    except (KeyError, TypeError, ValueError, CertifiedDeletionError) as e:
        raise SerializationError("malformed key file: {}".format(e))
    if key.theta.weight() != params.k:
        raise SerializationError("key file theta has weight {} but k={}".format(key.theta.weight(), params.k))
    return params, aux, key


def _check_magic_and_version(magic, version, expected_magic, what):
    if magic != expected_magic:
        raise SerializationError("bad {} magic {!r}, expected {!r}".format(what, magic, expected_magic))
    if version != FORMAT_VERSION:
        raise SerializationError("unsupported {} version {}".format(what, version))


class _BitReader:
    def __init__(self, data, offset, what):
        self._data = data
        self._offset = offset
        self._what = what

    def read(self, length):
        size = (length + 7) // 8
        chunk = self._data[self._offset:self._offset + size]
        if len(chunk) != size:
            raise SerializationError("{} truncated at byte {}".format(self._what, self._offset))
        self._offset += size
        try:
            return BitString.from_bytes(chunk, length)
        except LengthMismatchError as e:
            raise SerializationError("{} field at byte {} is malformed: {}".format(self._what, self._offset - size, e))

    def finish(self):
        if self._offset != len(self._data):
            raise SerializationError(
                "{} has {} trailing bytes".format(self._what, len(self._data) - self._offset)
            )
