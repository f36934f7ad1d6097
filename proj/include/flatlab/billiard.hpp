#pragma once

#include <cstdint>
#include <vector>

#include "flatlab/flows.hpp"
#include "flatlab/surface.hpp"

namespace flatlab {

struct BilliardState {
    Vec2 position;
    int sheet = 0;
    double time = 0;
};

struct BounceEvent {
    Vec2 position;
    int sheet = 0;       // sheet after the event
    double time = 0;
    int edge = -1;       // edge index, or -1-v for a passage through vertex v
    Vec2 direction;      // outgoing unit direction
};

struct Trajectory {
    std::vector<BounceEvent> events;
    BilliardState final_state;
    Vec2 final_direction;
    bool singular = false;
    double singular_time = 0;
};

// Segment-by-segment reflection flow at unit speed. Corners with interior
// angle pi/q lift to regular points of the unfolding and the flow passes
// through them; cone corners (p >= 2) end the trajectory as singular.
Trajectory billiard_flow(const PolygonSpec& P, const BilliardState& start, double theta, double T);

struct ReturnEvent {
    double t = 0, d = 0, t_times_d = 0;
    int sheet = 0;
};

struct RecurrenceRecord {
    double theta = 0;
    BilliardState start;
    std::vector<ReturnEvent> samples;
    double min_t_times_d = 1e300;
    double argmin_t = 0;
    double argmin_d = 0;
    int argmin_sheet = 0;
    bool singular = false;
    double singular_time = 0;
    bool ignore_sheets = false;
};

// min over t in [1, T] of t * d(p, b_t p) with d the same-sheet Euclidean
// distance (cross-sheet returns are infinitely far unless ignore_sheets).
// Segment-interior minima of t*d are solved in closed form.
RecurrenceRecord recurrence_stat(const PolygonSpec& P, const BilliardState& p, double theta,
                                 double T, bool ignore_sheets = false);

struct CorollaryViolation {
    int trial = -1;
    double t = 0, d = 0;
    double t0 = 0;
    bool witness_found = false;
    Holonomy witness;
    double witness_length = 0;
    bool cross_sheet = false;
    int event_sheet = 0;
};

struct CorollaryReport {
    bool precondition_ok = false;
    double eps = 0;
    double c = 0;
    double t0_max = 0;
    double certified_min_systole = 0;
    Holonomy short_vector;  // present when the precondition fails
    double short_time = 0;
    int trials = 0;
    bool passed = false;
    std::vector<CorollaryViolation> violations;
};

// Certifies F+ r_phi unfold(P) in K_eps up to time 2 ln T - ln c (phi the
// rotation sending direction theta to vertical), then checks
// min t*d >= c = eps^2/2 over random start points. On violation at time t
// it reports a saddle connection shorter than eps at t0 = 2 ln t - ln c,
// or the cross-sheet return that explains it. force_trials runs the trials
// and the witness extraction even when the certification failed.
CorollaryReport corollary_check(const PolygonSpec& P, double theta, double eps, double T,
                                int trials, std::uint64_t seed, double c_override = 0,
                                bool ignore_sheets = false, bool force_trials = false);

// Rotation angle phi with r_phi (cos theta, sin theta) = (0, 1).
double unfolding_rotation_angle(double theta);

}  // namespace flatlab
