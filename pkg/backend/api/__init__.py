# backend.api package

