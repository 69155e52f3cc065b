#pragma once

#include "rmerton/scenario.hpp"

namespace rmerton::fixtures {

// Borrow-to-buy scenario with a binding portfolio cap; pi* = 2, K = 0.12.
inline Scenario borrow_to_buy() {
    Scenario s;
    s.utility = {UtilityKind::Power, 0.5, 1.0, 0.1};
    s.rates = {0.02, 0.04};
    s.constraints = {-1.0, 2.0, 0.01, 0.8};
    s.uncertainty = RectUncertainty{0.10, 0.12, 0.1, 0.2};
    s.T = 2.0;
    s.x0 = 1.0;
    return s;
}

// No-trading band: mu_lo <= r <= mu_hi.
inline Scenario no_trading() {
    Scenario s = borrow_to_buy();
    s.uncertainty = RectUncertainty{0.01, 0.03, 0.1, 0.2};
    return s;
}

// Shortsale with an interior short position; pi* = -0.5, K = 0.0225.
inline Scenario shortsale() {
    Scenario s = borrow_to_buy();
    s.rates = {0.02, 0.05};
    s.uncertainty = RectUncertainty{0.00, 0.01, 0.1, 0.2};
    return s;
}

// Lend-and-buy: 0 < beta2 < 1.
inline Scenario lend_and_buy() {
    Scenario s = borrow_to_buy();
    s.rates = {0.02, 0.05};
    s.uncertainty = RectUncertainty{0.04, 0.06, 0.15, 0.25};
    return s;
}

// Correlated ambiguity with a strictly interior worst case: alpha0 = 1/30.
inline Scenario correlated_interior() {
    Scenario s;
    s.utility = {UtilityKind::Power, 0.5, 1.0, 0.1};
    s.rates = {0.02, 0.02};
    s.constraints = {-kInf, kInf, 0.01, 0.8};
    s.uncertainty = CorrelatedUncertainty{0.12, 0.0, 1.0, 0.5, 0.5};
    s.T = 2.0;
    s.x0 = 1.0;
    return s;
}

inline Scenario log_base() {
    Scenario s = borrow_to_buy();
    s.utility = {UtilityKind::Log, 0.0, 0.5, 0.07};
    return s;
}

}  // namespace rmerton::fixtures
