#include "network_guard.hpp"

#include <dlfcn.h>
#include <cerrno>
#include <sys/socket.h>

#include <atomic>

namespace {

std::atomic<std::size_t> g_attempts{0};
std::atomic<bool> g_allowed{false};

}  // namespace

namespace airkit::testing {

std::size_t socket_attempts() { return g_attempts.load(); }
void reset_socket_attempts() { g_attempts = 0; }
void allow_sockets(bool allow) { g_allowed = allow; }

}  // namespace airkit::testing

extern "C" int socket(int domain, int type, int protocol) {
    // AF_UNIX is local IPC (e.g. name-service caching), not networking.
    if (domain == AF_UNIX) {
        using Fn = int (*)(int, int, int);
        static const auto real = reinterpret_cast<Fn>(dlsym(RTLD_NEXT, "socket"));
        return real(domain, type, protocol);
    }
    ++g_attempts;
    if (!g_allowed) {
        errno = EACCES;
        return -1;
    }
    using Fn = int (*)(int, int, int);
    static const auto real = reinterpret_cast<Fn>(dlsym(RTLD_NEXT, "socket"));
    return real(domain, type, protocol);
}

extern "C" int connect(int fd, const struct sockaddr* addr, socklen_t len) {
    using Fn = int (*)(int, const struct sockaddr*, socklen_t);
    static const auto real = reinterpret_cast<Fn>(dlsym(RTLD_NEXT, "connect"));
    if (addr != nullptr && addr->sa_family == AF_UNIX) return real(fd, addr, len);
    ++g_attempts;
    if (!g_allowed) {
        errno = EACCES;
        return -1;
    }
    return real(fd, addr, len);
}
