#include "mctune/promela.hpp"

#include <sstream>

namespace mctune {

namespace {

void emit_header(std::ostringstream& os, const PlatformConfig& platform,
                 const ProblemSpec& problem, bool full_hierarchy) {
    const int nd = full_hierarchy ? platform.nd : 1;
    const int nu = full_hierarchy ? platform.nu : 1;
    os << "/* Execution model of the " << to_string(problem.kernel)
       << " kernel on the abstract platform. */\n"
       << "#define ND " << nd << "\n"
       << "#define NU " << nu << "\n"
       << "#define NP " << platform.np << "\n"
       << "#define GMT " << platform.gmt << "\n\n";
}

void emit_globals(std::ostringstream& os, bool minimum, int size) {
    if (minimum)
        os << "mtype = { go, gowg, stop, done, n_end_wg, end_wg };\n";
    else
        os << "mtype = { go, stop, done };\n";
    os << "\n"
       << "int size;\n"
       << "int WG, TS, WGs;\n"
       << "int NWD, NWU, NWE, allNWE;\n"
       << "int NRP_work;\n"
       << "int time;\n"
       << "int T = 100; /* over-time bound checked by the ltl claim */\n"
       << "bool FIN;\n";
    if (minimum)
        os << "#define MAX 999999999\n"
           << "int glob[" << size << "];\n"
           << "int loc[" << "NU * NP" << "];\n"
           << "int nwg_next;\n";
    os << "\n"
       << "inline long_work (gt, tz) {\n"
       << "  do\n"
       << "  :: time >= (start_time + (gt * tz)) -> break;\n"
       << "  :: else -> atomic {\n"
       << "       cur_time = time;\n"
       << "       NRP_work++;\n"
       << "       time == cur_time + 1; /* wait for the clock */\n"
       << "     }\n"
       << "  od\n"
       << "}\n\n";
    if (minimum)
        os << "inline take_min (a, b) {\n"
           << "  if\n"
           << "  :: b < a -> a = b;\n"
           << "  :: else -> skip;\n"
           << "  fi\n"
           << "}\n\n";
}

void emit_clock(std::ostringstream& os) {
    os << "proctype clock () {\n"
       << "  do\n"
       << "  :: FIN -> break;\n"
       << "  :: allNWE != 0 && NRP_work == allNWE ->\n"
       << "       atomic { NRP_work = 0; time++; }\n"
       << "  od\n"
       << "}\n\n";
}

void emit_host(std::ostringstream& os) {
    os << "proctype host () {\n"
       << "  chan d_hst = [0] of { mtype };\n"
       << "  chan hst_d = [0] of { mtype };\n"
       << "  int i;\n"
       << "  FIN = false;\n"
       << "  atomic { for (i : 0 .. NWD - 1) { run device(d_hst, hst_d); } }\n"
       << "  for (i : 0 .. NWD - 1) { hst_d ! go; }\n"
       << "  if\n"
       << "  :: WGs <= (NU * ND) ->\n"
       << "       for (i : 0 .. NWD - 1) { d_hst ? done; hst_d ! stop; }\n"
       << "  :: else ->\n"
       << "       for (i : 0 .. WGs / NU - ND - 1) {\n"
       << "         d_hst ? done;\n"
       << "         allNWE = allNWE + NWE * NWU;\n"
       << "         hst_d ! go;\n"
       << "       }\n"
       << "       for (i : 0 .. ND - 1) { d_hst ? done; hst_d ! stop; }\n"
       << "  fi\n"
       << "  FIN = true;\n"
       << "}\n\n";
}

void emit_abstract_device(std::ostringstream& os) {
    os << "proctype device (chan d_hst; chan hst_d) {\n"
       << "  chan dev_u = [0] of { mtype };\n"
       << "  chan u_dev = [0] of { mtype };\n"
       << "  int i;\n"
       << "  atomic { for (i : 0 .. NWU - 1) { run unit(dev_u, u_dev); } }\n"
       << "  do\n"
       << "  :: hst_d ? go ->\n"
       << "       for (i : 0 .. NWU - 1) { dev_u ! go; }\n"
       << "       for (i : 0 .. NWU - 1) { u_dev ? done; allNWE = allNWE - NWE; }\n"
       << "       d_hst ! done;\n"
       << "  :: hst_d ? stop ->\n"
       << "       atomic { for (i : 0 .. NWU - 1) { dev_u ! stop; } }\n"
       << "       break;\n"
       << "  od\n"
       << "}\n\n";
}

void emit_abstract_unit(std::ostringstream& os) {
    os << "proctype unit (chan dev_u; chan u_dev) {\n"
       << "  chan pex_b = [0] of { mtype };\n"
       << "  chan b_pex = [0] of { mtype };\n"
       << "  chan pex_u = [0] of { mtype };\n"
       << "  chan u_pex = [0] of { mtype };\n"
       << "  int i;\n"
       << "  run barrier(pex_b, b_pex);\n"
       << "  atomic { for (i : 0 .. NWE - 1) { run pex(i, pex_b, b_pex, pex_u, u_pex); } }\n"
       << "  do\n"
       << "  :: dev_u ? go ->\n"
       << "       for (i : 0 .. NWE - 1) { u_pex ! go; }\n"
       << "       /* reactivate finished elements until WG work items are served */\n"
       << "       for (i : 0 .. WG - NWE - 1) { pex_u ? done; u_pex ! go; }\n"
       << "       for (i : 0 .. NWE - 1) { pex_u ? done; }\n"
       << "       u_dev ! done;\n"
       << "  :: dev_u ? stop ->\n"
       << "       pex_b ! stop;\n"
       << "       atomic { for (i : 0 .. NWE - 1) { u_pex ! stop; } }\n"
       << "       break;\n"
       << "  od\n"
       << "}\n\n";
}

void emit_abstract_barrier(std::ostringstream& os) {
    os << "proctype barrier (chan pex_b; chan b_pex) {\n"
       << "  int i;\n"
       << "  do\n"
       << "  :: pex_b ? done ->\n"
       << "       for (i : 1 .. NWE - 1) { pex_b ? done; }\n"
       << "       atomic { for (i : 0 .. NWE - 1) { b_pex ! go; } }\n"
       << "  :: pex_b ? stop -> break;\n"
       << "  od\n"
       << "}\n\n";
}

void emit_abstract_pex(std::ostringstream& os) {
    os << "proctype pex (byte me; chan pex_b; chan b_pex; chan pex_u; chan u_pex) {\n"
       << "  int start_time, cur_time;\n"
       << "  int i;\n"
       << "  do\n"
       << "  :: u_pex ? go ->\n"
       << "       atomic { start_time = time; cur_time = time; }\n"
       << "       for (i : 0 .. (size / TS - 1)) {\n"
       << "         long_work(GMT, TS); /* load a tile from global memory */\n"
       << "         pex_b ! done; b_pex ? go; /* waiting for local co-workers */\n"
       << "         start_time = time;\n"
       << "         long_work(1, TS); /* compute on the tile in local memory */\n"
       << "         pex_b ! done; b_pex ? go; /* waiting for local co-workers */\n"
       << "         start_time = time;\n"
       << "       }\n"
       << "       long_work(GMT, 1); /* copy the result to global memory */\n"
       << "       pex_u ! done;\n"
       << "  :: u_pex ? stop -> break;\n"
       << "  od\n"
       << "}\n\n";
}

void emit_min_device(std::ostringstream& os) {
    os << "proctype device (chan d_hst; chan hst_d) {\n"
       << "  chan dev_u = [0] of { byte, mtype };\n"
       << "  chan u_dev = [0] of { mtype };\n"
       << "  int i;\n"
       << "  atomic { for (i : 0 .. NWU - 1) { run unit(i, dev_u, u_dev); } }\n"
       << "  do\n"
       << "  :: hst_d ? go ->\n"
       << "       for (i : 0 .. NWU - 1) { atomic { dev_u ! nwg_next, go; nwg_next++; } }\n"
       << "       for (i : 0 .. NWU - 1) { u_dev ? done; }\n"
       << "       d_hst ! done;\n"
       << "  :: hst_d ? stop ->\n"
       << "       atomic { for (i : 0 .. NWU - 1) { dev_u ! 0, stop; } }\n"
       << "       break;\n"
       << "  od\n"
       << "}\n\n";
}

void emit_min_unit(std::ostringstream& os) {
    os << "proctype unit (byte me; chan dev_u; chan u_dev) {\n"
       << "  chan pex_b = [0] of { mtype };\n"
       << "  chan b_pex = [0] of { mtype };\n"
       << "  chan pex_u = [0] of { mtype };\n"
       << "  chan u_pex = [0] of { byte, mtype };\n"
       << "  int i, iter, num;\n"
       << "  byte nwg;\n"
       << "  run barrier(pex_b, b_pex);\n"
       << "  atomic { for (i : 0 .. NWE - 1) { run pex(i, me, pex_b, b_pex, pex_u, u_pex); } }\n"
       << "  do\n"
       << "  :: dev_u ? nwg, go ->\n"
       << "       for (i : 0 .. NWE - 1) { u_pex ! nwg, gowg; }\n"
       << "       for (i : 0 .. NWE - 1) { u_pex ! 0, go; }\n"
       << "       iter = 1;\n"
       << "       num = 0;\n"
       << "       /* reactivate finished elements until WG work items are served */\n"
       << "       for (i : 0 .. WG - NWE - 1) {\n"
       << "         atomic {\n"
       << "           pex_u ? n_end_wg;\n"
       << "           u_pex ! iter, go;\n"
       << "           num++;\n"
       << "           if\n"
       << "           :: num >= NWE -> iter++; num = 0;\n"
       << "           :: else -> skip;\n"
       << "           fi\n"
       << "         }\n"
       << "       }\n"
       << "       for (i : 0 .. NWE - 1) { pex_u ? end_wg; }\n"
       << "       u_dev ! done;\n"
       << "  :: dev_u ? 0, stop ->\n"
       << "       pex_b ! stop;\n"
       << "       atomic { for (i : 0 .. NWE - 1) { u_pex ! 0, stop; } }\n"
       << "       break;\n"
       << "  od\n"
       << "}\n\n";
}

void emit_min_barrier(std::ostringstream& os) {
    os << "proctype barrier (chan pex_b; chan b_pex) {\n"
       << "  int i;\n"
       << "  do\n"
       << "  :: pex_b ? done ->\n"
       << "       for (i : 1 .. NWE - 1) { pex_b ? done; }\n"
       << "       allNWE = allNWE - (NWE - 1);\n"
       << "       b_pex ! go; /* release the reducing element only */\n"
       << "  :: pex_b ? stop -> break;\n"
       << "  od\n"
       << "}\n\n";
}

void emit_min_pex(std::ostringstream& os) {
    os << "proctype pex (byte me; byte mu; chan pex_b; chan b_pex; chan pex_u; chan u_pex) {\n"
       << "  int start_time, cur_time;\n"
       << "  int glob_id, shift, i, iter;\n"
       << "  byte nwg;\n"
       << "  byte myloc = me + mu * NP; /* my place in local memory */\n"
       << "  do\n"
       << "  :: u_pex ? nwg, gowg ->\n"
       << "       do\n"
       << "       :: u_pex ? iter, go ->\n"
       << "            atomic { start_time = time; cur_time = time; }\n"
       << "            glob_id = (WG > NP -> nwg * WG + me + iter * NP : nwg * WG + me);\n"
       << "            shift = glob_id * TS;\n"
       << "            for (i : 0 .. TS - 1) {\n"
       << "              take_min(loc[myloc], glob[i + shift]);\n"
       << "              start_time = time;\n"
       << "              long_work(GMT, 1); /* access to global memory */\n"
       << "            }\n"
       << "            if\n"
       << "            :: (iter + 1) >= (WG / NWE) -> break;\n"
       << "            :: else -> pex_u ! n_end_wg;\n"
       << "            fi\n"
       << "       od\n"
       << "       /* group end: reduce the local slots and publish the minimum */\n"
       << "       pex_b ! done;\n"
       << "       if\n"
       << "       :: me == 0 ->\n"
       << "            b_pex ? go; /* waiting for local co-workers */\n"
       << "            for (i : 1 .. NWE - 1) {\n"
       << "              take_min(loc[myloc], loc[myloc + i]);\n"
       << "              start_time = time;\n"
       << "              long_work(1, 1); /* access to local memory */\n"
       << "            }\n"
       << "            take_min(glob[0], loc[myloc]);\n"
       << "            start_time = time;\n"
       << "            long_work(GMT, 1); /* copy the result to global memory */\n"
       << "            allNWE = allNWE - 1;\n"
       << "       :: else -> skip;\n"
       << "       fi\n"
       << "       pex_u ! end_wg;\n"
       << "  :: u_pex ? 0, stop -> break;\n"
       << "  od\n"
       << "}\n\n";
}

void emit_main(std::ostringstream& os, const ProblemSpec& problem) {
    const int n = log2_exact(problem.size);
    os << "active proctype main () {\n"
       << "  int i;\n"
       << "  int n = " << n << ";\n"
       << "  size = " << problem.size << "; /* size = 2^n */\n";
    if (problem.kernel == KernelKind::Minimum)
        os << "  /* loading input data to global memory */\n"
           << "  for (i : 0 .. size - 1) { glob[i] = size - i; }\n"
           << "  /* preparing local memory */\n"
           << "  for (i : 0 .. NU * NP - 1) { loc[i] = MAX; }\n";
    os << "  /* workgroup size selection */\n"
       << "  select (i : 1 .. n - 1);\n"
       << "  WG = size >> (n - i);\n"
       << "  /* tile size selection */\n"
       << "  select (i : 1 .. n - 1);\n"
       << "  TS = size >> (n - i);\n";
    if (problem.kernel == KernelKind::Minimum)
        os << "  /* oversized tiles would index past the input */\n"
           << "  (WG * TS <= size);\n";
    os << "  /* number of working groups */\n"
       << "  WGs = size / (WG * TS);\n"
       << "  WGs = (WGs > 0 -> WGs : 1);\n"
       << "  /* number of working devices */\n"
       << "  NWD = (WGs <= NU * ND -> (WGs / NU) : ND);\n"
       << "  NWD = (WGs / NU -> NWD : 1);\n"
       << "  /* number of working units */\n"
       << "  NWU = (WGs <= NU -> WGs : NU);\n"
       << "  /* number of working elements */\n"
       << "  NWE = (WG <= NP -> WG : NP);\n"
       << "  /* total number of working elements */\n"
       << "  allNWE = NWE * NWU * NWD;\n"
       << "  atomic {\n"
       << "    run host();\n"
       << "    run clock();\n"
       << "  }\n"
       << "}\n\n";
}

void emit_ltl(std::ostringstream& os) {
    os << "/* the computation cannot finish within T time units */\n"
       << "ltl over_time { [] (FIN -> (time > T)) }\n";
}

}  // namespace

std::string export_promela(const PlatformConfig& platform, const ProblemSpec& problem,
                           bool full_hierarchy) {
    platform.validate();
    problem.validate();
    const bool minimum = problem.kernel == KernelKind::Minimum;

    std::ostringstream os;
    emit_header(os, platform, problem, full_hierarchy);
    emit_globals(os, minimum, problem.size);
    emit_clock(os);
    if (minimum) {
        emit_min_barrier(os);
        emit_min_pex(os);
        emit_min_unit(os);
        emit_min_device(os);
    } else {
        emit_abstract_barrier(os);
        emit_abstract_pex(os);
        emit_abstract_unit(os);
        emit_abstract_device(os);
    }
    emit_host(os);
    emit_main(os, problem);
    emit_ltl(os);
    return os.str();
}

}  // namespace mctune
