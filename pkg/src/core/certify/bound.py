import math

from src.core.errors import PreconditionError
from src.core.model import NeutralSystem
from src.models.schemas import Certificate, ExponentialBound, StabilityTest


def solution_bound(sys: NeutralSystem, cert: Certificate) -> ExponentialBound:
    """
    Coefficients of the exponential estimate from a certified rate certificate

        c_psi   = (e^{rate sigma} - 1) |A| / (rate (1 - |A|))
        c_phi_k = (e^{rate tau_k} - 1) |B_k| / (rate (1 - |A|))
        c_f     = 1 / (rate (1 - |A|))

    The sups are the ones recorded in the certificate, so the bound and the
    verdict use the same constants.
    """
    if cert.test_id not in (StabilityTest.THM31, StabilityTest.THM31A) or not cert.certified:
        raise PreconditionError("solution bounds need a certified rate certificate")
    if "M0" not in cert.constants:
        raise PreconditionError("certificate does not record M0")

    rate = cert.value("lambda")
    a = cert.value("A_sup")
    scale = rate * (1.0 - a)
    c_psi = math.expm1(rate * sys.sigma) * a / scale
    c_phi = [math.expm1(rate * tau) * cert.value(f"B{k + 1}_sup") / scale for k, tau in enumerate(sys.taus)]
    return ExponentialBound(
        rate=rate,
        m0=cert.value("M0"),
        t0=sys.t0,
        c_psi=c_psi,
        c_phi=c_phi,
        c_f=1.0 / scale,
        route=cert.route,
    )
