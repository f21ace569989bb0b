"""Compiled inner loops for circuit evaluation, QAOA layers, and annealing.

Everything here is also implemented with plain numpy elsewhere in the
package; tests cross-check the two paths.  Kernels consume pre-generated
random numbers so that all randomness stays in numpy generators.
"""

import math

import numpy as np
from numba import njit

GATE_H = 0
GATE_RY = 1
GATE_RZ = 2
GATE_CX = 3

_SQRT_HALF = 1.0 / math.sqrt(2.0)


@njit(cache=True)
def apply_circuit(codes, q0, q1, pidx, fixed, theta, amps):
    """Apply a compiled gate list in place to ``amps`` (length 2**n)."""
    d = amps.shape[0]
    for g in range(codes.shape[0]):
        code = codes[g]
        if pidx[g] >= 0:
            ang = theta[pidx[g]]
        else:
            ang = fixed[g]
        if code == GATE_H:
            step = 1 << q0[g]
            for base in range(0, d, 2 * step):
                for j in range(base, base + step):
                    a0 = amps[j]
                    a1 = amps[j + step]
                    amps[j] = (a0 + a1) * _SQRT_HALF
                    amps[j + step] = (a0 - a1) * _SQRT_HALF
        elif code == GATE_RY:
            c = math.cos(0.5 * ang)
            s = math.sin(0.5 * ang)
            step = 1 << q0[g]
            for base in range(0, d, 2 * step):
                for j in range(base, base + step):
                    a0 = amps[j]
                    a1 = amps[j + step]
                    amps[j] = c * a0 - s * a1
                    amps[j + step] = s * a0 + c * a1
        elif code == GATE_RZ:
            p0 = complex(math.cos(0.5 * ang), -math.sin(0.5 * ang))
            p1 = complex(math.cos(0.5 * ang), math.sin(0.5 * ang))
            step = 1 << q0[g]
            for base in range(0, d, 2 * step):
                for j in range(base, base + step):
                    amps[j] = amps[j] * p0
                    amps[j + step] = amps[j + step] * p1
        elif code == GATE_CX:
            cbit = 1 << q0[g]
            tbit = 1 << q1[g]
            for k in range(d):
                if (k & cbit) != 0 and (k & tbit) == 0:
                    tmp = amps[k]
                    amps[k] = amps[k | tbit]
                    amps[k | tbit] = tmp


@njit(cache=True)
def apply_circuit_batch(codes, q0, q1, pidx, fixed, thetas, out):
    """Run the same circuit for every parameter row of ``thetas``.

    ``out`` must hold the start state in every row; it is evolved in place.
    """
    for b in range(thetas.shape[0]):
        apply_circuit(codes, q0, q1, pidx, fixed, thetas[b], out[b])


@njit(cache=True)
def qaoa_layers(diag, gammas, betas, n, amps):
    """Alternating exact phase separator / transverse mixer layers in place."""
    d = amps.shape[0]
    for layer in range(gammas.shape[0]):
        g = gammas[layer]
        for k in range(d):
            ang = g * diag[k]
            amps[k] = amps[k] * complex(math.cos(ang), -math.sin(ang))
        beta = betas[layer]
        c = math.cos(beta)
        s = math.sin(beta)
        for q in range(n):
            step = 1 << q
            for base in range(0, d, 2 * step):
                for j in range(base, base + step):
                    a0 = amps[j]
                    a1 = amps[j + step]
                    amps[j] = c * a0 - 1j * s * a1
                    amps[j + step] = -1j * s * a0 + c * a1


@njit(cache=True)
def qaoa_layers_dense(evecs, evecs_ct, evals, gammas, betas, n, amps):
    """QAOA layers with the phase separator applied in a dense eigenbasis."""
    d = amps.shape[0]
    for layer in range(gammas.shape[0]):
        g = gammas[layer]
        work = evecs_ct @ amps
        for k in range(d):
            ang = g * evals[k]
            work[k] = work[k] * complex(math.cos(ang), -math.sin(ang))
        amps[:] = evecs @ work
        beta = betas[layer]
        c = math.cos(beta)
        s = math.sin(beta)
        for q in range(n):
            step = 1 << q
            for base in range(0, d, 2 * step):
                for j in range(base, base + step):
                    a0 = amps[j]
                    a1 = amps[j + step]
                    amps[j] = c * a0 - 1j * s * a1
                    amps[j + step] = -1j * s * a0 + c * a1


@njit(cache=True)
def sa_shot(bits, h, coupling, temps, uniforms):
    """One annealing shot: sequential single-flip Metropolis sweeps in place.

    ``bits`` holds the initial configuration and is left at the final one.
    Returns the final energy relative to the constant offset.  The cost is
    the Ising form  sum_i h_i s_i + sum_{i<j} J_ij s_i s_j  with s = +1 for
    bit 0 and -1 for bit 1.
    """
    n = bits.shape[0]
    spins = np.empty(n)
    for i in range(n):
        spins[i] = 1.0 - 2.0 * bits[i]
    energy = 0.0
    for i in range(n):
        energy += h[i] * spins[i]
        for j in range(i + 1, n):
            energy += coupling[i, j] * spins[i] * spins[j]
    u = 0
    for sweep in range(temps.shape[0]):
        temp = temps[sweep]
        for i in range(n):
            field = h[i]
            for j in range(n):
                if j != i:
                    field += coupling[min(i, j), max(i, j)] * spins[j]
            delta = -2.0 * spins[i] * field
            if delta <= 0.0 or uniforms[u] < math.exp(-delta / temp):
                spins[i] = -spins[i]
                energy += delta
            u += 1
    for i in range(n):
        bits[i] = 0 if spins[i] > 0.0 else 1
    return energy
