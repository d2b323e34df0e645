"""Jitted numerical kernel for the steady shallow-water solver.

One pseudo-time step of a finite-volume scheme on a structured grid:
MUSCL (minmod) reconstruction of (h, u, v, eta), hydrostatic correction of
face depths for a well-balanced bed-slope source, Rusanov fluxes, and a
semi-implicit Manning friction update. Conserved variables are (h, hu, hv)
on 2-D arrays shaped (ny, nx).

Boundaries: prescribed-flux inflow on the left face (total discharge split
across rows by conveyance h^(5/3)), fixed-stage outflow on the right face
(ghost stage linearly extrapolated so the face sits at z_f), reflective
walls on both banks (closed-form mirror flux, exactly zero mass leak).
"""

import numpy as np
from numba import njit


@njit(cache=True)
def _minmod(a, b):
    if a > 0.0 and b > 0.0:
        return a if a < b else b
    if a < 0.0 and b < 0.0:
        return a if a > b else b
    return 0.0


@njit(cache=True)
def swe_step(h, hu, hv, z, q_total, zf, dx, dy, g, manning_n, cfl, dry_tol):
    """One explicit pseudo-time step.

    Returns (h1, hu1, hv1, dt, residual, ok) where ok is 0 if a non-finite
    value appeared. The residual is the max cell rate of change normalized
    by characteristic fill/force scales, so steady states score ~0.
    """
    ny, nx = h.shape
    half_g = 0.5 * g

    # ---- primitives and the global wave-speed bound for dt
    u = np.zeros((ny, nx))
    v = np.zeros((ny, nx))
    eta = np.empty((ny, nx))
    a_max = 1e-12
    for j in range(ny):
        for i in range(nx):
            hij = h[j, i]
            eta[j, i] = z[j, i] + hij
            if hij > dry_tol:
                uij = hu[j, i] / hij
                vij = hv[j, i] / hij
                u[j, i] = uij
                v[j, i] = vij
                a = (uij * uij + vij * vij) ** 0.5 + (g * hij) ** 0.5
                if a > a_max:
                    a_max = a
    dmin = dx if dx < dy else dy
    dt = cfl * dmin / a_max

    # ---- MUSCL half-jumps (zero at boundary-adjacent cells in the normal
    # direction; boundary closures below rely on that).
    sxh = np.zeros((ny, nx))
    sxu = np.zeros((ny, nx))
    sxv = np.zeros((ny, nx))
    sxe = np.zeros((ny, nx))
    syh = np.zeros((ny, nx))
    syu = np.zeros((ny, nx))
    syv = np.zeros((ny, nx))
    sye = np.zeros((ny, nx))
    for j in range(ny):
        for i in range(1, nx - 1):
            sxh[j, i] = 0.5 * _minmod(h[j, i] - h[j, i - 1], h[j, i + 1] - h[j, i])
            sxu[j, i] = 0.5 * _minmod(u[j, i] - u[j, i - 1], u[j, i + 1] - u[j, i])
            sxv[j, i] = 0.5 * _minmod(v[j, i] - v[j, i - 1], v[j, i + 1] - v[j, i])
            sxe[j, i] = 0.5 * _minmod(eta[j, i] - eta[j, i - 1], eta[j, i + 1] - eta[j, i])
    for j in range(1, ny - 1):
        for i in range(nx):
            syh[j, i] = 0.5 * _minmod(h[j, i] - h[j - 1, i], h[j + 1, i] - h[j, i])
            syu[j, i] = 0.5 * _minmod(u[j, i] - u[j - 1, i], u[j + 1, i] - u[j, i])
            syv[j, i] = 0.5 * _minmod(v[j, i] - v[j - 1, i], v[j + 1, i] - v[j, i])
            sye[j, i] = 0.5 * _minmod(eta[j, i] - eta[j - 1, i], eta[j + 1, i] - eta[j, i])

    # ---- inflow distribution by conveyance of the first column
    q_unit = np.zeros(ny)
    wsum = 0.0
    for j in range(ny):
        if h[j, 0] > dry_tol:
            wsum += h[j, 0] ** (5.0 / 3.0) * dy
    if wsum > 0.0 and q_total > 0.0:
        for j in range(ny):
            if h[j, 0] > dry_tol:
                q_unit[j] = q_total * h[j, 0] ** (5.0 / 3.0) / wsum

    # ---- x-direction fluxes and hydrostatically corrected cell-face depths
    fxh = np.empty((ny, nx + 1))
    fxhu = np.empty((ny, nx + 1))
    fxhv = np.empty((ny, nx + 1))
    hhxm = np.empty((ny, nx))  # corrected depth of each cell at its left face
    hhxp = np.empty((ny, nx))  # ... at its right face
    for j in range(ny):
        # inflow face (prescribed flux; ghost bed equals interior bed)
        h0 = h[j, 0]
        hhxm[j, 0] = h0
        q0 = q_unit[j]
        if h0 > dry_tol and q0 > 0.0:
            uin = q0 / h0
            fxh[j, 0] = q0
            fxhu[j, 0] = q0 * uin + half_g * h0 * h0
            fxhv[j, 0] = 0.0
        else:
            fxh[j, 0] = 0.0
            fxhu[j, 0] = half_g * h0 * h0
            fxhv[j, 0] = 0.0

        # interior faces
        for f in range(1, nx):
            il = f - 1
            ir = f
            hl = h[j, il] + sxh[j, il]
            el = eta[j, il] + sxe[j, il]
            zl = el - hl
            ul = u[j, il] + sxu[j, il]
            vl = v[j, il] + sxv[j, il]
            hr = h[j, ir] - sxh[j, ir]
            er = eta[j, ir] - sxe[j, ir]
            zr = er - hr
            ur = u[j, ir] - sxu[j, ir]
            vr = v[j, ir] - sxv[j, ir]
            zs = zl if zl > zr else zr
            hls = hl + zl - zs
            if hls < 0.0:
                hls = 0.0
            hrs = hr + zr - zs
            if hrs < 0.0:
                hrs = 0.0
            hhxp[j, il] = hls
            hhxm[j, ir] = hrs
            al = abs(ul) + (g * hls) ** 0.5
            ar = abs(ur) + (g * hrs) ** 0.5
            a = al if al > ar else ar
            fl0 = hls * ul
            fr0 = hrs * ur
            fxh[j, f] = 0.5 * (fl0 + fr0) - 0.5 * a * (hrs - hls)
            fxhu[j, f] = 0.5 * (fl0 * ul + half_g * hls * hls + fr0 * ur + half_g * hrs * hrs) \
                - 0.5 * a * (hrs * ur - hls * ul)
            fxhv[j, f] = 0.5 * (fl0 * vl + fr0 * vr) - 0.5 * a * (hrs * vr - hls * vl)

        # outflow face (fixed stage zf imposed at the face via ghost extrapolation)
        hl = h[j, nx - 1]
        ul = u[j, nx - 1]
        vl = v[j, nx - 1]
        el = eta[j, nx - 1]
        hg = 2.0 * zf - el - z[j, nx - 1]
        if hg < 0.0:
            hg = 0.0
        hhxp[j, nx - 1] = hl
        al = abs(ul) + (g * hl) ** 0.5
        ag = abs(ul) + (g * hg) ** 0.5
        a = al if al > ag else ag
        fl0 = hl * ul
        fg0 = hg * ul
        fxh[j, nx] = 0.5 * (fl0 + fg0) - 0.5 * a * (hg - hl)
        fxhu[j, nx] = 0.5 * (fl0 * ul + half_g * hl * hl + fg0 * ul + half_g * hg * hg) \
            - 0.5 * a * (hg * ul - hl * ul)
        fxhv[j, nx] = 0.5 * (fl0 * vl + fg0 * vl) - 0.5 * a * (hg * vl - hl * vl)

    # ---- y-direction fluxes
    fyh = np.empty((ny + 1, nx))
    fyhu = np.empty((ny + 1, nx))
    fyhv = np.empty((ny + 1, nx))
    hhym = np.empty((ny, nx))
    hhyp = np.empty((ny, nx))
    for i in range(nx):
        # bottom wall: mirror flux, zero mass and along-wall momentum flux
        hb = h[0, i]
        vb = v[0, i]
        hhym[0, i] = hb
        a = abs(vb) + (g * hb) ** 0.5
        fyh[0, i] = 0.0
        fyhu[0, i] = 0.0
        fyhv[0, i] = hb * vb * vb + half_g * hb * hb - a * hb * vb

        for f in range(1, ny):
            jl = f - 1
            jr = f
            hl = h[jl, i] + syh[jl, i]
            el = eta[jl, i] + sye[jl, i]
            zl = el - hl
            ul = u[jl, i] + syu[jl, i]
            vl = v[jl, i] + syv[jl, i]
            hr = h[jr, i] - syh[jr, i]
            er = eta[jr, i] - sye[jr, i]
            zr = er - hr
            ur = u[jr, i] - syu[jr, i]
            vr = v[jr, i] - syv[jr, i]
            zs = zl if zl > zr else zr
            hls = hl + zl - zs
            if hls < 0.0:
                hls = 0.0
            hrs = hr + zr - zs
            if hrs < 0.0:
                hrs = 0.0
            hhyp[jl, i] = hls
            hhym[jr, i] = hrs
            al = abs(vl) + (g * hls) ** 0.5
            ar = abs(vr) + (g * hrs) ** 0.5
            a = al if al > ar else ar
            gl0 = hls * vl
            gr0 = hrs * vr
            fyh[f, i] = 0.5 * (gl0 + gr0) - 0.5 * a * (hrs - hls)
            fyhu[f, i] = 0.5 * (gl0 * ul + gr0 * ur) - 0.5 * a * (hrs * ur - hls * ul)
            fyhv[f, i] = 0.5 * (gl0 * vl + half_g * hls * hls + gr0 * vr + half_g * hrs * hrs) \
                - 0.5 * a * (hrs * vr - hls * vl)

        # top wall
        ht = h[ny - 1, i]
        vt = v[ny - 1, i]
        hhyp[ny - 1, i] = ht
        a = abs(vt) + (g * ht) ** 0.5
        fyh[ny, i] = 0.0
        fyhu[ny, i] = 0.0
        fyhv[ny, i] = ht * vt * vt + half_g * ht * ht + a * ht * vt

    # ---- update, friction, positivity, residual
    h1 = np.empty((ny, nx))
    hu1 = np.empty((ny, nx))
    hv1 = np.empty((ny, nx))
    h_ref = dry_tol
    for j in range(ny):
        for i in range(nx):
            hrp = h[j, i] + sxh[j, i]
            hrm = h[j, i] - sxh[j, i]
            erp = eta[j, i] + sxe[j, i]
            erm = eta[j, i] - sxe[j, i]
            zrp = erp - hrp
            zrm = erm - hrm
            srcx = half_g * (hhxp[j, i] * hhxp[j, i] - hrp * hrp) \
                + half_g * (hrm * hrm - hhxm[j, i] * hhxm[j, i]) \
                - g * 0.5 * (hrp + hrm) * (zrp - zrm)

            hqp = h[j, i] + syh[j, i]
            hqm = h[j, i] - syh[j, i]
            eqp = eta[j, i] + sye[j, i]
            eqm = eta[j, i] - sye[j, i]
            zqp = eqp - hqp
            zqm = eqm - hqm
            srcy = half_g * (hhyp[j, i] * hhyp[j, i] - hqp * hqp) \
                + half_g * (hqm * hqm - hhym[j, i] * hhym[j, i]) \
                - g * 0.5 * (hqp + hqm) * (zqp - zqm)

            dhdt = -(fxh[j, i + 1] - fxh[j, i]) / dx - (fyh[j + 1, i] - fyh[j, i]) / dy
            dhudt = -(fxhu[j, i + 1] - fxhu[j, i]) / dx - (fyhu[j + 1, i] - fyhu[j, i]) / dy \
                + srcx / dx
            dhvdt = -(fxhv[j, i + 1] - fxhv[j, i]) / dx - (fyhv[j + 1, i] - fyhv[j, i]) / dy \
                + srcy / dy

            hn = h[j, i] + dt * dhdt
            if hn < 0.0:
                hn = 0.0
            hun = hu[j, i] + dt * dhudt
            hvn = hv[j, i] + dt * dhvdt
            if hn > dry_tol:
                uu = hun / hn
                vv = hvn / hn
                sp = (uu * uu + vv * vv) ** 0.5
                fac = 1.0 + dt * g * manning_n * manning_n * sp / hn ** (4.0 / 3.0)
                hun /= fac
                hvn /= fac
                if hn > h_ref:
                    h_ref = hn
            else:
                hun = 0.0
                hvn = 0.0
            h1[j, i] = hn
            hu1[j, i] = hun
            hv1[j, i] = hvn

    c_ref = (g * h_ref) ** 0.5
    lx = nx * dx
    rate_h = c_ref * h_ref / lx
    rate_m = g * h_ref * h_ref / lx
    resid = 0.0
    ok = 1
    for j in range(ny):
        for i in range(nx):
            if not (np.isfinite(h1[j, i]) and np.isfinite(hu1[j, i]) and np.isfinite(hv1[j, i])):
                ok = 0
            rh = abs(h1[j, i] - h[j, i]) / (dt * rate_h)
            rm = abs(hu1[j, i] - hu[j, i]) / (dt * rate_m)
            rv = abs(hv1[j, i] - hv[j, i]) / (dt * rate_m)
            if rh > resid:
                resid = rh
            if rm > resid:
                resid = rm
            if rv > resid:
                resid = rv
    return h1, hu1, hv1, dt, resid, ok
