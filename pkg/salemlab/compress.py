# -*- coding: utf-8 -*-
"""A small deterministic lossless compressor for binary words.

Words are ``str`` objects over ``'0'`` and ``'1'``. The compressed
form is a bitstring too:

  gamma(N) + mode (2 bits) + payload

Three payloads are tried and the shortest kept:

  * ``00`` the word itself;
  * ``01`` the LZSS encoding of the word;
  * ``10`` the LZSS encoding of the word's run-length form.

The LZSS stage works on bits. A token is either a literal run, ``0``
followed by gamma(count) and the raw bits, or a back reference, ``1``
followed by the offset in ``window_bits`` bits and gamma of the match
length beyond the minimum. Back references may overlap their own
output, which is how constant and periodic words collapse.

Integers are written with the Elias gamma code throughout.
"""

from __future__ import absolute_import

from collections import deque
from itertools import groupby

from salemlab.common import DomainError


MODE_RAW = '00'
MODE_LZ = '01'
MODE_RLE_LZ = '10'


def gamma_encode(n):
    if n < 1:
        raise DomainError('gamma code needs a positive integer, not %r' % (n,))
    bits = bin(n)[2:]
    return '0' * (len(bits) - 1) + bits


def gamma_decode(bits, pos=0):
    "Returns (value, next_position)."
    zeros = 0
    while bits[pos + zeros] == '0':
        zeros += 1
    end = pos + 2 * zeros + 1
    if end > len(bits):
        raise DomainError('truncated gamma code at %r' % (pos,))
    return int(bits[pos + zeros:end], 2), end


def check_word(word):
    if not word:
        raise DomainError('expected nonempty binary word')
    if word.strip('01'):
        raise DomainError('expected word over "0" and "1", not %r...'
                          % (word[:16],))
    return word


def rle_encode(word):
    "First bit, then the gamma-coded lengths of the alternating runs."
    runs = [len(list(group)) for _, group in groupby(word)]
    return word[0] + ''.join([gamma_encode(r) for r in runs])


def rle_decode(bits, length):
    bit, pos = bits[0], 1
    out, total = [], 0
    while total < length:
        run, pos = gamma_decode(bits, pos)
        out.append(bit * run)
        total += run
        bit = '1' if bit == '0' else '0'
    return ''.join(out)


def _match_length(bits, src, dst, limit):
    length, step = 0, 64
    # chunked slice comparison first, then bit by bit
    while dst + length + step <= limit and \
            bits[src + length:src + length + step] == \
            bits[dst + length:dst + length + step]:
        length += step
    while dst + length < limit and bits[src + length] == bits[dst + length]:
        length += 1
    return length


class LZSSCodec(object):
    def __init__(self, window_bits=12, min_match=16, max_candidates=32):
        self.window_bits = window_bits
        self.window = 2 ** window_bits
        self.min_match = min_match
        self.max_candidates = max_candidates

    def _match_cost(self, length):
        return 1 + self.window_bits + len(gamma_encode(length - self.min_match + 1))

    def encode(self, bits):
        n, gram = len(bits), self.min_match
        table = {}
        out, literal_start = [], 0

        def _flush_literals(stop):
            if stop > literal_start:
                out.append('0' + gamma_encode(stop - literal_start)
                           + bits[literal_start:stop])

        def _remember(pos):
            if pos + gram <= n:
                key = bits[pos:pos + gram]
                try:
                    table[key].append(pos)
                except KeyError:
                    table[key] = deque([pos], maxlen=self.max_candidates)

        i = 0
        while i < n:
            best_len, best_off = 0, 0
            if i + gram <= n:
                for src in reversed(table.get(bits[i:i + gram], ())):
                    offset = i - src
                    if offset > self.window:
                        break
                    length = _match_length(bits, src, i, n)
                    if length > best_len:
                        best_len, best_off = length, offset
            if best_len >= gram and best_len > self._match_cost(best_len):
                _flush_literals(i)
                offset_bits = format(best_off - 1, '0%db' % self.window_bits)
                out.append('1' + offset_bits
                           + gamma_encode(best_len - gram + 1))
                for pos in range(i, i + best_len):
                    _remember(pos)
                i += best_len
                literal_start = i
            else:
                _remember(i)
                i += 1
        _flush_literals(n)
        return ''.join(out)

    def decode(self, data, length):
        out, pos = [], 0
        produced = 0
        while produced < length:
            flag = data[pos]
            pos += 1
            if flag == '0':
                count, pos = gamma_decode(data, pos)
                out.extend(data[pos:pos + count])
                pos += count
                produced += count
            else:
                offset = int(data[pos:pos + self.window_bits], 2) + 1
                pos += self.window_bits
                extra, pos = gamma_decode(data, pos)
                match = extra + self.min_match - 1
                start = len(out) - offset
                for k in range(match):
                    out.append(out[start + k])
                produced += match
        return ''.join(out), pos


DEFAULT_CODEC = LZSSCodec()


def lz_compress(word, codec=DEFAULT_CODEC):
    check_word(word)
    header = gamma_encode(len(word))
    candidates = [MODE_RAW + word,
                  MODE_LZ + codec.encode(word)]
    rle = rle_encode(word)
    if len(rle) < len(word):
        candidates.append(MODE_RLE_LZ + codec.encode(rle))
    best = min(candidates, key=lambda c: (len(c), c[:2]))
    return header + best


def lz_decompress(data, codec=DEFAULT_CODEC):
    length, pos = gamma_decode(data, 0)
    mode, pos = data[pos:pos + 2], pos + 2
    payload = data[pos:]
    if mode == MODE_RAW:
        return payload[:length]
    if mode == MODE_LZ:
        return codec.decode(payload, length)[0]
    if mode == MODE_RLE_LZ:
        # the run-length form's size is not stored; decode tokens until
        # the runs cover the word
        return _decode_rle_lz(payload, length, codec)
    raise DomainError('unknown compression mode %r' % (mode,))


def _decode_rle_lz(payload, length, codec):
    # grow the decoded run-length form token by token
    out, pos = [], 0
    while True:
        flag = payload[pos]
        pos += 1
        if flag == '0':
            count, pos = gamma_decode(payload, pos)
            out.extend(payload[pos:pos + count])
            pos += count
        else:
            offset = int(payload[pos:pos + codec.window_bits], 2) + 1
            pos += codec.window_bits
            extra, pos = gamma_decode(payload, pos)
            start = len(out) - offset
            for k in range(extra + codec.min_match - 1):
                out.append(out[start + k])
        if pos >= len(payload):
            break
    return rle_decode(''.join(out), length)


def compressed_length(word, codec=DEFAULT_CODEC):
    "Length in bits of lz_compress(word)."
    return len(lz_compress(word, codec))
