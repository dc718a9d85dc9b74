# backend.models package

